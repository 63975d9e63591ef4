#pragma once

#include "salem/compress.hpp"
#include "salem/dimension.hpp"
#include "salem/dyadic.hpp"
#include "salem/spectral.hpp"
#include "salem/walks.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace salem {

using Json = nlohmann::json;

// 17 significant digits: round-trips every double exactly.
std::string format_sig17(double v);

// --- text formats ------------------------------------------------------
// flow:  "# flow alpha=<dec> C=<dec> depth=<int>" then "<n> <j> <num>/<den>" lines
std::string flow_to_text(const TreeFlowMeasure& flow);
TreeFlowMeasure flow_from_text(const std::string& text);

// word:  "len=<N>" header then lowercase hex of the bit string (LSB-first bytes)
std::string word_to_text(const PackedBits& word);
PackedBits word_from_text(const std::string& text);

std::string csv_atoms(const AtomicMeasure& measure);     // t,weight
std::string csv_spectrum(const SpectrumSample& sample);  // u,re,im,abs

// --- JSON payloads ------------------------------------------------------
Json json_flow_check(const FlowCheckReport& rep);
Json json_frostman(const FrostmanReport& rep);
Json json_spectrum_sidecar(const SpectrumSample& sample);
Json json_decay(const DecayFit& fit);
Json json_moment(const MomentEstimate& est);
Json json_tail(const TailReport& rep);
Json json_deficiency(const DeficiencyReport& rep);
Json json_ladder_manifest(const RefinementLadder& ladder);
Json json_dimension_report(const DimensionReport& rep);

// --- SVG ----------------------------------------------------------------
std::string svg_decay_plot(const SpectrumSample& sample, const DecayFit& fit);
std::string svg_dimension_plot(const DimensionReport& rep);

// --- misc ---------------------------------------------------------------
std::uint64_t fnv1a64(std::string_view data);
std::string hex16(std::uint64_t v);
std::string build_stamp();

} // namespace salem
