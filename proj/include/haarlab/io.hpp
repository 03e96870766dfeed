#pragma once

#include "haarlab/grid.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/median.hpp"

#include <json.hpp>

#include <string>

namespace haarlab {

// rationals as "p/q" strings
nlohmann::json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);
Rat parse_rational(const nlohmann::json& j);
std::string format_rational(const Rat& r);

// "leaf,re,im" in leaf order
void write_function_csv(const std::string& path, const SampledFunction& f);
SampledFunction read_function_csv(const std::string& path, const GridPtr& g);

// "level,cube,branch,re,im"; the top averages use level -1 and branch 0
void write_coefficients_csv(const std::string& path, const HaarCoefficients& c);
HaarCoefficients read_coefficients_csv(const std::string& path, const GridPtr& g);

// binary container: "HLOP", u32 header length, JSON header {grid, rows, cols, tag, dtype, basis},
// then rows*cols (re, im) little-endian doubles, row-major
void write_operator(const std::string& path, const DenseOperator& op);
DenseOperator read_operator(const std::string& path);
// "row,col,re,im" for every entry
void write_operator_csv(const std::string& path, const DenseOperator& op);

// "re,im,w"
WeightedPointSet read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const WeightedPointSet& P);

nlohmann::json median_to_json(const MedianResult& r);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace haarlab
