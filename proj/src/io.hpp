#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "maps.hpp"
#include "orbits.hpp"
#include "pressure.hpp"
#include "spectrum.hpp"
#include "symbolic.hpp"
#include "validate.hpp"

namespace thermokit {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// {"family": ..., "params": {...}}; unknown keys are config errors.
MapModel map_from_json(const Json& doc);
MapModel map_from_text(std::string_view text);
MapModel map_from_file(const std::string& path);
Json map_to_json(const MapModel& model);

// Shortest round-trip decimal; inf, -inf and nan spelled out.
std::string format_number(double v);

class CsvTable {
public:
    CsvTable(std::string command, std::vector<std::string> columns);
    void add(std::vector<std::string> row);
    // Comment line written after the rows.
    void note(std::string text) { notes_.push_back(std::move(text)); }
    std::size_t size() const { return rows_.size(); }
    void write(std::ostream& os) const;
    std::string str() const;

private:
    std::string command_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> notes_;
};

// Non-finite numbers become null.
Json number(double v);
// Adds schema_version and the command name.
Json document(std::string_view command);
std::string dump(const Json& j);

Json to_json(const PressureEstimate& e);
Json to_json(const CurvePoint& p);
Json to_json(const RegimeReport& r);
Json to_json(const LeftDerivative& d);
Json to_json(const SpectrumPoint& p);
Json to_json(const SpectrumFeatures& f);
Json to_json(const ValidationReport& v);
Json to_json(const ConjugacyReport& r);
Json to_json(const TruncatedSpectra& s);
Json to_json(const CFExpansion& cf);

CsvTable pressure_csv(const std::vector<CurvePoint>& points);
CsvTable spectrum_csv(const std::vector<SpectrumPoint>& points);
CsvTable gurevich_csv(const GurevichResult& r);
CsvTable orbit_csv(const std::vector<BirkhoffSample>& samples);
CsvTable induced_csv(const std::vector<InducedBranch>& branches);

}  // namespace thermokit
