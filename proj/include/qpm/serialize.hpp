#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qpm/conjectures.hpp"
#include "qpm/magic.hpp"
#include "qpm/moments.hpp"
#include "qpm/sinkhorn.hpp"

namespace qpm {

// Complex numbers serialize as [re, im]; loaders validate shapes and throw
// invalid_input on malformed documents. JSON objects keep sorted keys, CSV
// doubles print with %.17g; outputs carry no timestamps, so repeated runs
// with equal inputs are byte identical.

nlohmann::json grid_to_json(const VectorGrid& g);
VectorGrid grid_from_json(const nlohmann::json& j);

nlohmann::json magic_to_json(const MagicUnitary& u);
MagicUnitary magic_from_json(const nlohmann::json& j);

nlohmann::json latin_to_json(const LatinSquare& l);
LatinSquare latin_from_json(const nlohmann::json& j);

nlohmann::json series_to_json(const MomentSeries& s);
MomentSeries series_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const TrialReport& r);

// Per-run scalars only; row-level data goes to CSV.
nlohmann::json trace_summary_json(const FlatteningTrace& t);

// "pipeline,p,r,estimate,stderr,samples,reference" rows.
std::string series_csv(const MomentSeries& s);

// "run,iteration,residual,vol,f2[,f3]" rows across runs.
std::string traces_csv(const std::vector<FlatteningTrace>& runs, bool with_f3);

std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace qpm
