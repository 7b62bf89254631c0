// Copyright 2026 The pnrtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pnrtomo/classifier.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <limits>
#include <thread>

#include "pnrtomo/errors.h"

namespace pnrtomo {

namespace {

// Grid times are products of an index and dt; allow for rounding when
// snapping a requested time onto the grid.
constexpr double kGridSlack = 1e-6;

std::string label_name(std::size_t label, std::size_t outcomes) {
  if (label + 1 == outcomes) return ">=" + std::to_string(label);
  return std::to_string(label);
}

/// Index into `w` of template sample 0. Checks that the grids agree and that
/// the template span lies inside the record.
std::size_t window_offset(const Waveform &w, const ReferenceSet &refs) {
  if (std::abs(w.dt - refs.dt()) > 1e-9 * refs.dt()) {
    throw std::invalid_argument("waveform sample spacing differs from the references");
  }
  const double pos = (refs.first_sample_time() - w.t0) / w.dt;
  const double index = std::round(pos);
  if (std::abs(pos - index) > kGridSlack) {
    throw std::invalid_argument("waveform grid is not aligned with the references");
  }
  if (index < 0.0 || index + static_cast<double>(refs.length()) > static_cast<double>(w.samples.size())) {
    throw std::out_of_range("classification window lies outside the waveform");
  }
  return static_cast<std::size_t>(index);
}

std::size_t nearest_sample(double t, double t0, double dt, std::size_t samples, const char *what) {
  const double index = std::round((t - t0) / dt);
  if (index < 0.0 || index >= static_cast<double>(samples)) {
    throw std::out_of_range(std::string(what) + " lies outside the waveform");
  }
  return static_cast<std::size_t>(index);
}

// Amplitude histograms over a shared bin grid.
struct BinGrid {
  double low = 0.0;
  double width = 1.0;
  std::size_t bins = 1;

  std::size_t bin_of(double v) const {
    const double b = std::floor((v - low) / width);
    if (b < 0.0) return 0;
    return std::min(bins - 1, static_cast<std::size_t>(b));
  }
  double center(std::size_t b) const { return low + (static_cast<double>(b) + 0.5) * width; }
};

double quantile(std::vector<double> &v, double q) {
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

BinGrid choose_bins(std::vector<double> pooled, std::size_t fixed_bins) {
  constexpr std::size_t kMinBins = 16;
  constexpr std::size_t kMaxBins = 4096;
  const auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw SeparationError("all window amplitudes are identical");

  std::size_t bins = fixed_bins;
  if (bins == 0) {
    const double iqr = quantile(pooled, 0.75) - quantile(pooled, 0.25);
    const double n = static_cast<double>(pooled.size());
    double width = 2.0 * iqr / std::cbrt(n);
    if (!(width > 0.0)) width = (hi - lo) / std::sqrt(n);
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::clamp(bins, kMinBins, kMaxBins);
  }
  // Pad by one bin on each side so edge classes can still form a maximum.
  const double width = (hi - lo) / static_cast<double>(bins);
  return BinGrid{lo - width, width, bins + 2};
}

constexpr double kPeakSignificance = 3.0;

/// Bins that are local maxima with topographic prominence >= threshold.
/// Flat tops report their leftmost bin.
std::vector<std::size_t> find_peaks(const std::vector<double> &h, double threshold,
                                    std::size_t min_separation) {
  std::vector<std::size_t> peaks;
  const std::size_t n = h.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (h[i] <= 0.0 || (i > 0 && h[i - 1] >= h[i])) continue;
    std::size_t j = i;
    while (j + 1 < n && h[j + 1] == h[i]) ++j;
    if (j + 1 < n && h[j + 1] > h[i]) continue;

    // Bases: lowest bin between the peak and the nearest higher bin (or edge).
    double left_min = h[i];
    for (std::size_t k = i; k-- > 0 && h[k] <= h[i];) left_min = std::min(left_min, h[k]);
    double right_min = h[i];
    for (std::size_t k = j + 1; k < n && h[k] <= h[i]; ++k) right_min = std::min(right_min, h[k]);
    // Counts are Poisson; a dip shallower than a few standard deviations of
    // the peak count is not evidence of two classes.
    const double significance = kPeakSignificance * std::sqrt(h[i]);
    if (h[i] - std::max(left_min, right_min) >= std::max(threshold, significance)) peaks.push_back(i);
    i = j;
  }

  // Of peaks closer than min_separation bins keep the taller (the lower on ties).
  std::vector<std::size_t> kept;
  for (std::size_t p : peaks) {
    if (!kept.empty() && p - kept.back() < min_separation) {
      if (h[p] > h[kept.back()]) kept.back() = p;
    } else {
      kept.push_back(p);
    }
  }
  return kept;
}

}  // namespace

std::string to_string(ReferenceMethod m) {
  return m == ReferenceMethod::kHistogram ? "histogram" : "supervised";
}

ReferenceMethod reference_method_from_string(const std::string &s) {
  if (s == "histogram") return ReferenceMethod::kHistogram;
  if (s == "supervised") return ReferenceMethod::kSupervised;
  throw ConfigError("reference_method", "expected histogram or supervised, got '" + s + "'");
}

void ClassifierConfig::validate() const {
  if (!std::isfinite(window_start) || !std::isfinite(window_end) || !(window_start < window_end)) {
    throw ConfigError("window_start", "window_start must be finite and below window_end");
  }
  if (!(single_point_time >= window_start && single_point_time <= window_end)) {
    throw ConfigError("single_point_time", "must lie within the window");
  }
  if (outcomes < 2) throw ConfigError("outcomes", "must be >= 2");
  if (!(peak_min_prominence > 0.0 && peak_min_prominence < 1.0)) {
    throw ConfigError("peak_min_prominence", "must lie in (0, 1)");
  }
  if (histogram_bins == 1) throw ConfigError("histogram_bins", "must be 0 (automatic) or >= 2");
  if (min_shots_per_label < 1) throw ConfigError("min_shots_per_label", "must be >= 1");
}

Json classifier_config_to_json(const ClassifierConfig &c) {
  return Json{{"window_start", c.window_start},
              {"window_end", c.window_end},
              {"single_point_time", c.single_point_time},
              {"outcomes", c.outcomes},
              {"histogram_bins", c.histogram_bins},
              {"peak_min_prominence", c.peak_min_prominence},
              {"min_shots_per_label", c.min_shots_per_label},
              {"reference_method", to_string(c.reference_method)}};
}

ClassifierConfig classifier_config_from_json(const Json &j, ClassifierConfig c) {
  if (!j.is_object()) throw ConfigError("classifier", "expected an object");
  auto read_double = [&](const char *key, double &field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(key, "expected a number");
    field = j[key].get<double>();
  };
  auto read_count = [&](const char *key, std::size_t &field) {
    if (!j.contains(key)) return;
    if (!is_count(j[key])) throw ConfigError(key, "expected a non-negative integer");
    field = j[key].get<std::size_t>();
  };
  read_double("window_start", c.window_start);
  read_double("window_end", c.window_end);
  read_double("single_point_time", c.single_point_time);
  read_double("peak_min_prominence", c.peak_min_prominence);
  read_count("outcomes", c.outcomes);
  read_count("histogram_bins", c.histogram_bins);
  read_count("min_shots_per_label", c.min_shots_per_label);
  if (j.contains("reference_method")) {
    if (!j["reference_method"].is_string()) throw ConfigError("reference_method", "expected a string");
    c.reference_method = reference_method_from_string(j["reference_method"].get<std::string>());
  }
  c.validate();
  return c;
}

SampleWindow snap_window(double start, double end, double t0, double dt, std::size_t samples) {
  const double first = std::ceil((start - t0) / dt - kGridSlack);
  const double last = std::floor((end - t0) / dt + kGridSlack);
  if (first > last) throw std::out_of_range("window contains no samples");
  if (first < 0.0 || last >= static_cast<double>(samples)) {
    throw std::out_of_range("window lies outside the waveform");
  }
  return SampleWindow{static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

ReferenceSet::ReferenceSet(std::vector<std::vector<double>> templates, double window_start,
                           double window_end, double first_sample_time, double dt,
                           double single_point_time)
    : templates_(std::move(templates)),
      window_start_(window_start),
      window_end_(window_end),
      first_sample_time_(first_sample_time),
      dt_(dt),
      single_point_time_(single_point_time) {
  if (templates_.size() < 2) throw std::invalid_argument("ReferenceSet: need at least two templates");
  if (!(dt_ > 0.0)) throw std::invalid_argument("ReferenceSet: dt must be > 0");
  const std::size_t len = templates_.front().size();
  if (len == 0) throw std::invalid_argument("ReferenceSet: empty templates");
  for (const auto &t : templates_) {
    if (t.size() != len) throw std::invalid_argument("ReferenceSet: templates differ in length");
    for (double v : t) {
      if (!std::isfinite(v)) throw std::invalid_argument("ReferenceSet: non-finite template value");
    }
  }
  single_point_index_ = nearest_sample(single_point_time_, first_sample_time_, dt_, len,
                                       "single_point_time");
  for (std::size_t l = 1; l < templates_.size(); ++l) {
    if (!(templates_[l][single_point_index_] > templates_[l - 1][single_point_index_])) {
      throw std::invalid_argument("ReferenceSet: template values at the single-point time must increase "
                                  "with label (labels " +
                                  std::to_string(l - 1) + " and " + std::to_string(l) + ")");
    }
  }
}

Json reference_set_to_json(const ReferenceSet &refs) {
  Json templates = Json::array();
  Json labels = Json::array();
  for (std::size_t l = 0; l < refs.outcomes(); ++l) {
    templates.push_back(refs.templates(l));
    labels.push_back(label_name(l, refs.outcomes()));
  }
  return Json{{"window_start", refs.window_start()},
              {"window_end", refs.window_end()},
              {"first_sample_time", refs.first_sample_time()},
              {"dt", refs.dt()},
              {"single_point_time", refs.single_point_time()},
              {"labels", labels},
              {"templates", templates}};
}

ReferenceSet reference_set_from_json(const Json &j) {
  try {
    return ReferenceSet(j.at("templates").get<std::vector<std::vector<double>>>(),
                        j.at("window_start").get<double>(), j.at("window_end").get<double>(),
                        j.at("first_sample_time").get<double>(), j.at("dt").get<double>(),
                        j.at("single_point_time").get<double>());
  } catch (const Json::exception &e) {
    throw ConfigError("references", e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError("references", e.what());
  }
}

ReferenceSet build_references_supervised(std::span<const Shot> shots, const ClassifierConfig &config) {
  config.validate();
  if (shots.empty()) throw CoverageError(0, "no shots to build references from");
  const Waveform &first = shots.front().waveform;
  const SampleWindow win =
      snap_window(config.window_start, config.window_end, first.t0, first.dt, first.samples.size());
  const std::size_t n_out = config.outcomes;

  std::vector<std::vector<double>> sums(n_out, std::vector<double>(win.size(), 0.0));
  std::vector<std::size_t> counts(n_out, 0);
  for (const Shot &s : shots) {
    const Waveform &w = s.waveform;
    if (w.dt != first.dt || w.t0 != first.t0 || w.samples.size() != first.samples.size()) {
      throw std::invalid_argument("build_references_supervised: shots are on different grids");
    }
    const std::size_t label = std::min<std::size_t>(s.detected_photons, n_out - 1);
    ++counts[label];
    for (std::size_t i = 0; i < win.size(); ++i) sums[label][i] += w.samples[win.first + i];
  }
  for (std::size_t l = 0; l < n_out; ++l) {
    if (counts[l] < config.min_shots_per_label) {
      throw CoverageError(l, "label " + label_name(l, n_out) + " has " + std::to_string(counts[l]) +
                                 " shots, need " + std::to_string(config.min_shots_per_label));
    }
    for (double &v : sums[l]) v /= static_cast<double>(counts[l]);
  }
  return ReferenceSet(std::move(sums), config.window_start, config.window_end, first.time(win.first),
                      first.dt, config.single_point_time);
}

ReferenceSet build_references_histogram(std::span<const Waveform> waveforms,
                                        const ClassifierConfig &config, std::size_t expected_outcomes) {
  config.validate();
  if (expected_outcomes < 2) throw std::invalid_argument("build_references_histogram: need N >= 2");
  if (waveforms.empty()) throw SeparationError("no waveforms to build references from");
  const Waveform &first = waveforms.front();
  const SampleWindow win =
      snap_window(config.window_start, config.window_end, first.t0, first.dt, first.samples.size());
  for (const Waveform &w : waveforms) {
    if (w.dt != first.dt || w.t0 != first.t0 || w.samples.size() != first.samples.size()) {
      throw std::invalid_argument("build_references_histogram: waveforms are on different grids");
    }
  }

  std::vector<double> pooled;
  pooled.reserve(waveforms.size() * win.size());
  for (const Waveform &w : waveforms) {
    for (std::size_t i = win.first; i <= win.last; ++i) pooled.push_back(w.samples[i]);
  }
  const BinGrid grid = choose_bins(std::move(pooled), config.histogram_bins);
  constexpr std::size_t kMinSeparationBins = 2;

  // Peak amplitudes at each window sample, refined to the centroid of the
  // samples nearest each peak. The top detected peak absorbs everything
  // above it so that it estimates the mean of the overflow class.
  std::vector<std::vector<double>> found(win.size());
  std::vector<double> column(waveforms.size());
  std::vector<double> hist(grid.bins);
  for (std::size_t i = 0; i < win.size(); ++i) {
    std::fill(hist.begin(), hist.end(), 0.0);
    for (std::size_t s = 0; s < waveforms.size(); ++s) {
      column[s] = waveforms[s].samples[win.first + i];
      hist[grid.bin_of(column[s])] += 1.0;
    }
    const double top = *std::max_element(hist.begin(), hist.end());
    std::vector<std::size_t> peaks =
        find_peaks(hist, config.peak_min_prominence * top, kMinSeparationBins);
    // Classes above N-1 only add peaks on top; they belong to the overflow.
    if (peaks.size() > expected_outcomes) peaks.resize(expected_outcomes);
    const bool complete = peaks.size() == expected_outcomes;
    for (std::size_t l = 0; l < peaks.size(); ++l) {
      const double c = grid.center(peaks[l]);
      double lo = c - 1.5 * grid.width;
      double hi = c + 1.5 * grid.width;
      if (l > 0) lo = std::max(lo, 0.5 * (c + grid.center(peaks[l - 1])));
      if (l + 1 < peaks.size()) {
        hi = std::min(hi, 0.5 * (c + grid.center(peaks[l + 1])));
      } else if (complete) {
        hi = std::numeric_limits<double>::infinity();
      }
      double sum = 0.0;
      std::size_t n = 0;
      for (double v : column) {
        if (v >= lo && v < hi) {
          sum += v;
          ++n;
        }
      }
      found[i].push_back(n > 0 ? sum / static_cast<double>(n) : c);
    }
  }

  std::vector<std::size_t> resolved;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].size() == expected_outcomes) resolved.push_back(i);
  }
  if (resolved.empty()) {
    throw SeparationError("no window sample resolves " + std::to_string(expected_outcomes) +
                          " histogram peaks; classes overlap");
  }

  // Unresolved samples are filled from resolved ones. A prediction for every
  // label (linear interpolation between the nearest resolved samples, or
  // linear extrapolation outward from the two nearest filled samples past the
  // first and last) decides which label each observed peak belongs to: the
  // nearest, the closer peak winning. Labels left without a peak keep the
  // interpolated value between resolved samples. Past the ends they take the
  // value at the adjacent filled sample scaled by the ratio seen for the
  // nearest matched label below, which follows the curvature of a rising edge
  // better than a straight line.
  std::vector<std::vector<double>> filled(win.size());
  for (std::size_t i : resolved) filled[i] = found[i];
  auto match = [&](std::size_t i, const std::vector<double> &predicted) {
    std::vector<std::optional<double>> matched(expected_outcomes);
    std::vector<double> distance(expected_outcomes, std::numeric_limits<double>::infinity());
    for (double peak : found[i]) {
      std::size_t nearest = 0;
      for (std::size_t l = 1; l < expected_outcomes; ++l) {
        if (std::abs(peak - predicted[l]) < std::abs(peak - predicted[nearest])) nearest = l;
      }
      const double d = std::abs(peak - predicted[nearest]);
      if (d < distance[nearest]) {
        distance[nearest] = d;
        matched[nearest] = peak;
      }
    }
    return matched;
  };

  for (std::size_t r = 0; r + 1 < resolved.size(); ++r) {
    const std::size_t a = resolved[r];
    const std::size_t b = resolved[r + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double f = static_cast<double>(i - a) / static_cast<double>(b - a);
      std::vector<double> predicted(expected_outcomes);
      for (std::size_t l = 0; l < expected_outcomes; ++l) {
        predicted[l] = (1.0 - f) * found[a][l] + f * found[b][l];
      }
      const auto matched = match(i, predicted);
      filled[i].resize(expected_outcomes);
      for (std::size_t l = 0; l < expected_outcomes; ++l) filled[i][l] = matched[l].value_or(predicted[l]);
    }
  }

  auto fill_edge = [&](std::size_t i, std::size_t near, std::optional<std::size_t> far) {
    std::vector<double> predicted = filled[near];
    if (far && !filled[*far].empty()) {
      for (std::size_t l = 0; l < expected_outcomes; ++l) predicted[l] += filled[near][l] - filled[*far][l];
    }
    const auto matched = match(i, predicted);
    filled[i].resize(expected_outcomes);
    std::optional<std::size_t> below;
    for (std::size_t l = 0; l < expected_outcomes; ++l) {
      if (matched[l]) {
        filled[i][l] = *matched[l];
        if (filled[near][l] > 0.0 && *matched[l] > 0.0) below = l;
      } else if (below) {
        filled[i][l] = filled[near][l] * (filled[i][*below] / filled[near][*below]);
      } else {
        filled[i][l] = predicted[l];
      }
    }
  };
  for (std::size_t i = resolved.front(); i-- > 0;) {
    fill_edge(i, i + 1, i + 2 < win.size() ? std::optional<std::size_t>(i + 2) : std::nullopt);
  }
  for (std::size_t i = resolved.back() + 1; i < win.size(); ++i) {
    fill_edge(i, i - 1, i >= 2 ? std::optional<std::size_t>(i - 2) : std::nullopt);
  }

  std::vector<std::vector<double>> templates(expected_outcomes, std::vector<double>(win.size()));
  for (std::size_t i = 0; i < win.size(); ++i) {
    for (std::size_t l = 0; l < expected_outcomes; ++l) {
      if (l > 0 && !(filled[i][l] > filled[i][l - 1])) {
        throw SeparationError("histogram templates for labels " + std::to_string(l - 1) + " and " +
                              std::to_string(l) + " cross at window sample " + std::to_string(i) +
                              "; classes overlap");
      }
      templates[l][i] = filled[i][l];
    }
  }
  try {
    return ReferenceSet(std::move(templates), config.window_start, config.window_end,
                        first.time(win.first), first.dt, config.single_point_time);
  } catch (const std::invalid_argument &e) {
    throw SeparationError(e.what());
  }
}

ReferenceSet build_references(std::span<const Shot> shots, const ClassifierConfig &config) {
  if (config.reference_method == ReferenceMethod::kSupervised) {
    return build_references_supervised(shots, config);
  }
  std::vector<Waveform> waveforms;
  waveforms.reserve(shots.size());
  for (const Shot &s : shots) waveforms.push_back(s.waveform);
  return build_references_histogram(waveforms, config, config.outcomes);
}

std::vector<double> pattern_scores(const Waveform &w, const ReferenceSet &refs) {
  const std::size_t offset = window_offset(w, refs);
  std::vector<double> scores(refs.outcomes(), 0.0);
  for (std::size_t l = 0; l < refs.outcomes(); ++l) {
    const std::vector<double> &t = refs.templates(l);
    double sse = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = w.samples[offset + i] - t[i];
      sse += d * d;
    }
    scores[l] = sse;
  }
  return scores;
}

namespace {

std::uint32_t argmin_first(const std::vector<double> &v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return static_cast<std::uint32_t>(best);
}

}  // namespace

std::uint32_t classify_pattern(const Waveform &w, const ReferenceSet &refs) {
  return argmin_first(pattern_scores(w, refs));
}

std::uint32_t classify_single_point(const Waveform &w, const ReferenceSet &refs,
                                    const ClassifierConfig &config) {
  const std::size_t ti = nearest_sample(config.single_point_time, refs.first_sample_time(), refs.dt(),
                                        refs.length(), "single_point_time");
  const std::size_t wi =
      nearest_sample(config.single_point_time, w.t0, w.dt, w.samples.size(), "single_point_time");
  const double v = w.samples[wi];
  std::vector<double> distance(refs.outcomes());
  for (std::size_t l = 0; l < refs.outcomes(); ++l) distance[l] = std::abs(v - refs.templates(l)[ti]);
  return argmin_first(distance);
}

BatchClassification classify_batch(std::span<const Shot> shots, const ReferenceSet &refs,
                                   const ClassifierConfig &config, unsigned threads) {
  BatchClassification out;
  out.pattern.resize(shots.size());
  out.single_point.resize(shots.size());
  out.scores.resize(shots.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out.scores[i] = pattern_scores(shots[i].waveform, refs);
      out.pattern[i] = argmin_first(out.scores[i]);
      out.single_point[i] = classify_single_point(shots[i].waveform, refs, config);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || shots.size() < 1024) {
    work(0, shots.size());
    return out;
  }
  // Exceptions cannot cross thread boundaries; collect the first one.
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  const std::size_t chunk = (shots.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(shots.size(), t * chunk);
    const std::size_t end = std::min(shots.size(), begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto &w : workers) w.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> accumulate_statistics(std::span<const std::uint32_t> labels, std::size_t outcomes) {
  if (labels.empty()) throw std::invalid_argument("accumulate_statistics: no labels");
  std::vector<std::uint64_t> counts(outcomes, 0);
  for (std::uint32_t l : labels) {
    if (l >= outcomes) {
      throw std::out_of_range("accumulate_statistics: label " + std::to_string(l) + " >= " +
                              std::to_string(outcomes));
    }
    ++counts[l];
  }
  std::vector<double> freq(outcomes);
  for (std::size_t l = 0; l < outcomes; ++l) {
    freq[l] = static_cast<double>(counts[l]) / static_cast<double>(labels.size());
  }
  return freq;
}

std::string classification_to_csv(const BatchClassification &batch) {
  std::string out = "shot,label";
  const std::size_t n_out = batch.scores.empty() ? 0 : batch.scores.front().size();
  for (std::size_t l = 0; l < n_out; ++l) out += ",sse" + std::to_string(l);
  out += '\n';
  for (std::size_t i = 0; i < batch.pattern.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(batch.pattern[i]);
    for (double v : batch.scores[i]) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

std::string single_point_to_csv(const BatchClassification &batch) {
  std::string out = "shot,label\n";
  for (std::size_t i = 0; i < batch.single_point.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(batch.single_point[i]) + '\n';
  }
  return out;
}

}  // namespace pnrtomo
