#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "hetero/constrained.hpp"
#include "hetero/lpca.hpp"
#include "hetero/nninit.hpp"

namespace hetero {

// Text container shared by all factor files:
//
//   hetero-factors 1
//   stage <lpca|nonneg|nonneg-pruned|nonneg-fitted|model>
//   n <rows>
//   k <width>
//   [reg_weight <value>]
//   matrix <name> <rows> <cols>      followed by <rows> lines of values
//   vector <name> <len>              followed by one line of values
//   end
//
// Values are written with 17 significant digits and read back exactly.

void save_lpca(std::ostream& out, const LpcaFactors& f);
LpcaFactors load_lpca(std::istream& in);

void save_nonneg(std::ostream& out, const NonnegFactors& f, const std::string& stage = "nonneg");
NonnegFactors load_nonneg(std::istream& in);

void save_model(std::ostream& out, const CommunityModel& m);
CommunityModel load_model(std::istream& in);

void save_dense(std::ostream& out, const DenseMatrix& m, const std::string& stage);
DenseMatrix load_dense(std::istream& in);

// Per community: sign, weight, odds multiplier exp(w), size at tau, and the
// `top` members with the highest membership.
void write_community_report(std::ostream& out, const CommunityModel& m, double tau = 0.5,
                            std::size_t top = 10);

// File helpers that surface the path on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace hetero
