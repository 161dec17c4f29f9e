#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topostat/signals.hpp"

namespace topostat {

// Signal-matrix CSV. Leading '#' comment lines carry provenance (operator tag
// and per-order row offsets), then a header row m1,...,mM and one value row
// per simplex: order-0 rows first, then order-1, and so on.
void write_signals_csv(std::ostream& out, const SignalEnsemble& signals);
void write_signals_csv(const std::string& path, const SignalEnsemble& signals);
SignalEnsemble read_signals_csv(std::istream& in);
SignalEnsemble read_signals_csv(const std::string& path);

// Two-column `index,value` CSV for PSDs and coefficient vectors.
void write_indexed_csv(std::ostream& out, const Eigen::VectorXd& values);
void write_indexed_csv(const std::string& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_indexed_csv(std::istream& in);
Eigen::VectorXd read_indexed_csv(const std::string& path);

// Mask file: one observed row index per line; '#' comments and blanks allowed.
std::vector<int> read_mask_indices(std::istream& in);
std::vector<int> read_mask_indices(const std::string& path);
void write_mask_indices(const std::string& path, const std::vector<int>& indices);

// Flat `key = value` configuration; '#' comments; later keys win.
std::map<std::string, std::string> read_config(std::istream& in);
std::map<std::string, std::string> read_config(const std::string& path);

// Shortest lossless decimal form, used for all value round-trip files.
std::string format_value(double value);

}  // namespace topostat
