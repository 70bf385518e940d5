#pragma once

#include <map>
#include <string>
#include <vector>

#include "ghostsim/correlation.hpp"

namespace ghostsim {

/// CSV with one '# key=value ...' metadata comment, then
/// coordinate,g2,stderr,oracle_g2,flag rows. Coordinates in meters, full
/// precision scientific notation, locale independent and byte deterministic.
/// Dark samples keep their coordinate but serialize empty g2/stderr with
/// flag=dark. Pass an empty oracle vector when no oracle curve applies.
void emit_slice_csv(const SliceCurve& slice, const std::vector<double>& oracle_g2,
                    const std::map<std::string, std::string>& metadata,
                    const std::string& path);

std::string slice_csv_text(const SliceCurve& slice, const std::vector<double>& oracle_g2,
                           const std::map<std::string, std::string>& metadata);

/// coordinate,intensity,stderr rows for the per-arm mean intensity.
void emit_intensity_csv(const Axis& axis, const std::vector<double>& mean,
                        const std::vector<double>& se,
                        const std::map<std::string, std::string>& metadata,
                        const std::string& path);

std::string format_full(double v);  // shortest round-trip scientific

}  // namespace ghostsim
