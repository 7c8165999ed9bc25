#pragma once

// JSON and CSV serialization of results. Doubles are written with
// round-trip precision so reruns produce identical bytes.

#include <ostream>
#include <vector>

#include <json.hpp>

#include "martinet/chains.hpp"
#include "martinet/flows.hpp"
#include "martinet/geometry.hpp"
#include "martinet/oracle.hpp"
#include "martinet/trace.hpp"

namespace martinet {

using Json = nlohmann::ordered_json;

Json to_json(const SpacePoint& p);
Json to_json(const SurfacePoint& p);
Json to_json(const DeltaBreakdown& d);
Json to_json(const MeasureEstimate& m);
Json to_json(const HorizontalPath& path);
Json to_json(const DistanceBracket& b);
Json to_json(const ChainSpec& c);
Json to_json(const ChainAudit& a);
Json to_json(const Normalization& n);
Json to_json(const AhlforsReport& r);
Json to_json(const BallBoxAudit& a);
Json to_json(const RatioSummary& s);
Json to_json(const EquivalenceReport& r);
Json to_json(const MonotonicityReport& r);
Json to_json(const EnergyEstimate& e);
Json to_json(const BesovEstimate& b);
Json to_json(const TraceReport& r);

/// t,x,y,z rows.
void write_path_csv(std::ostream& os, const std::vector<PathSample>& samples);
/// chain,index,generator,duration,x,y,z rows; index 0 is the start point.
void write_chain_csv(std::ostream& os, const std::vector<ChainSpec>& chains);
void write_ahlfors_csv(std::ostream& os, const AhlforsReport& r);
void write_besov_samples_csv(std::ostream& os, const std::vector<BesovSample>& samples);

}  // namespace martinet
