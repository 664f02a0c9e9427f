// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "iscap/harness.hpp"

namespace iscap {

enum class PlotKind { objective_vs_axis, rate_and_crb_vs_axis, time_vs_axis };

const char* to_string(PlotKind kind);
PlotKind parse_plot_kind(const std::string& name);

/// Standalone SVG with one line series per mode (per y-axis), standard-error
/// bars and labelled axes. rate_and_crb_vs_axis puts the MMF rate on the
/// left axis and the CRB on the right. Throws ConfigError on an empty result.
std::string render_plot(const SweepResult& result, PlotKind kind);

/// render_plot written to `path`. Throws IoError.
void emit_plot(const SweepResult& result, PlotKind kind, const std::string& path);

}  // namespace iscap
