#pragma once

// JSON encoding of engine requests and results. Epochs are 1-based on the
// wire and 0-based inside the engine; every function here converts.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iflow/flow.hpp"
#include "iflow/metrics.hpp"
#include "iflow/model.hpp"
#include "iflow/table.hpp"

namespace iflow::codec {

using json = nlohmann::json;

// Wire token for the Other bin when a class is literally named "Other".
inline constexpr const char* kOtherToken = "Other";
inline constexpr const char* kOtherEscape = "@other";

json encode_bin(const TrainingRun& run, const BinId& bin);
BinId decode_bin(const TrainingRun& run, const std::string& token);

ClassId decode_class(const TrainingRun& run, const std::string& label);
std::vector<std::string> split_list(const std::string& csv);

// Empty list selects every class. The Other bin is always kept.
ClassSelection decode_selection(const TrainingRun& run, const std::vector<std::string>& labels);
std::string encode_selection(const TrainingRun& run, const ClassSelection& sel);

// 1-based inclusive bounds; missing bounds default to the full run.
EpochRange decode_range(const TrainingRun& run, std::optional<long long> from,
                        std::optional<long long> to);
json encode_range(const EpochRange& range);

Measure decode_measure(const std::string& name);
const char* measure_name(Measure m) noexcept;

json encode_scores(const TrainingRun& run, const EpochRange& range, const DifficultyScores& scores);
json encode_flow(const TrainingRun& run, const FlowFrame& frame);
FlowFrame decode_flow(const TrainingRun& run, const json& j);
json encode_glyphs(const TrainingRun& run, const EpochRange& range, Measure rank_by,
                   const std::vector<std::vector<GlyphInfo>>& glyphs);
json encode_traces(const TrainingRun& run, const std::vector<TraceSegment>& segments);
json encode_confusion(const TrainingRun& run, const EpochRange& range, const ConfusionMatrix& cm);
ConfusionMatrix decode_confusion(const TrainingRun& run, const json& j);

TableSpec decode_table_spec(const TrainingRun& run, const json& j);
json encode_table_spec(const TrainingRun& run, const TableSpec& spec);
json encode_table_page(const TrainingRun& run, const TablePage& page);

}  // namespace iflow::codec
