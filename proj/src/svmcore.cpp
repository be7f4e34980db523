// Copyright 2026 The gamered Authors.
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

#include "gamered/svmcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "gamered/error.hpp"
#include "gamered/io.hpp"
#include "gamered/rng.hpp"
#include "gamered/simd/kernels.hpp"

namespace gamered {
namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-8;

// Rows of Q = Y M M' Y, cached as a dense symmetric matrix when small enough.
class KernelRows {
 public:
  KernelRows(const RowMatrix& m, const Vector& y, Eigen::Index cache_limit)
      : m_(m), y_(y), n_(m.rows()), cached_(n_ <= cache_limit), diag_(n_) {
    const auto& k = simd::active_table();
    const auto p = static_cast<std::size_t>(m.cols());
    if (cached_) {
      q_.resize(n_, n_);
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
          const double v = y_(i) * y_(j) * k.dot(m_.row(i).data(), m_.row(j).data(), p);
          q_(i, j) = v;
          q_(j, i) = v;
        }
      }
      diag_ = q_.diagonal();
    } else {
      for (Eigen::Index i = 0; i < n_; ++i) diag_(i) = k.dot(m_.row(i).data(), m_.row(i).data(), p);
      buf_[0].resize(n_);
      buf_[1].resize(n_);
    }
  }

  // Column `i` of Q (equal to row i). `slot` picks one of two scratch buffers
  // in uncached mode so that two rows can be alive at once.
  const double* row(Eigen::Index i, int slot) {
    if (cached_) return q_.col(i).data();
    const auto& k = simd::active_table();
    const auto p = static_cast<std::size_t>(m_.cols());
    Vector& b = buf_[slot];
    for (Eigen::Index t = 0; t < n_; ++t) b(t) = y_(i) * y_(t) * k.dot(m_.row(i).data(), m_.row(t).data(), p);
    return b.data();
  }

  double diag(Eigen::Index i) const { return diag_(i); }

 private:
  const RowMatrix& m_;
  const Vector& y_;
  Eigen::Index n_;
  bool cached_;
  Matrix q_;
  Vector diag_;
  Vector buf_[2];
};

struct SmoOutcome {
  Vector alpha;
  Vector w;
  double bias = 0.0;
  long long iterations = 0;
  bool converged = false;
  double gap = 0.0;
  std::vector<double> trace;
};

bool in_up(double y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0); }
bool in_low(double y, double a, double c) { return (y > 0 && a > 0) || (y < 0 && a < c); }

SmoOutcome run_smo(const RowMatrix& m, const Vector& y, double c, const SmoOptions& opt, const Vector* alpha0) {
  const Eigen::Index n = m.rows();
  KernelRows q(m, y, opt.cache_limit);
  SmoOutcome out;
  out.alpha = alpha0 ? *alpha0 : Vector::Zero(n);
  Vector& a = out.alpha;

  Vector g = Vector::Constant(n, -1.0);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (a(t) != 0.0) {
      const double* qt = q.row(t, 0);
      for (Eigen::Index s = 0; s < n; ++s) g(s) += a(t) * qt[s];
    }
  }
  // Dual objective -f with f = 1/2 a'Qa - 1'a = 1/2 sum a_t (G_t - 1).
  double objective = -0.5 * a.dot(g - Vector::Ones(n));
  if (opt.record_trace) out.trace.push_back(objective);

  while (true) {
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * g(t);
      if (in_up(y(t), a(t), c) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(y(t), a(t), c) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    out.gap = (i < 0 || j < 0) ? 0.0 : gmax - gmin;
    if (i < 0 || j < 0 || out.gap < opt.tolerance) {
      out.converged = true;
      break;
    }
    if (out.iterations >= opt.max_iterations) break;
    ++out.iterations;

    const double* qi = q.row(i, 0);
    const double* qj = q.row(j, 1);
    const double ai_old = a(i);
    const double aj_old = a(j);
    double ai = ai_old;
    double aj = aj_old;
    if (y(i) != y(j)) {
      double quad = q.diag(i) + q.diag(j) + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-g(i) - g(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = q.diag(i) + q.diag(j) - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (g(i) - g(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    a(i) = ai;
    a(j) = aj;
    const double di = ai - ai_old;
    const double dj = aj - aj_old;
    // Exact change of f for the two-coordinate step, from the old gradient.
    const double df = g(i) * di + g(j) * dj + 0.5 * (q.diag(i) * di * di + q.diag(j) * dj * dj) + qi[j] * di * dj;
    objective -= df;
    if (opt.record_trace) out.trace.push_back(objective);
    for (Eigen::Index t = 0; t < n; ++t) g(t) += qi[t] * di + qj[t] * dj;
  }

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  long long n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * g(t);
    if (a(t) >= c) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a(t) <= 0) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      sum_free += yg;
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  out.bias = -rho;

  out.w = Vector::Zero(m.cols());
  const auto& k = simd::active_table();
  for (Eigen::Index t = 0; t < n; ++t) {
    if (a(t) != 0.0) k.axpy(a(t) * y(t), m.row(t).data(), out.w.data(), static_cast<std::size_t>(m.cols()));
  }
  return out;
}

void require_trainable(const LabeledDataset& data, double c) {
  data.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("SVM constant C must be positive");
  if (!data.has_both_classes()) throw InvalidArgument("SVM training needs both classes present");
}

SvmDualSolution finish(SmoOutcome&& o, const std::vector<Eigen::Index>& rows, Eigen::Index n_full) {
  SvmDualSolution s;
  s.alpha = Vector::Zero(n_full);
  for (std::size_t t = 0; t < rows.size(); ++t) s.alpha(rows[t]) = o.alpha(static_cast<Eigen::Index>(t));
  s.w = std::move(o.w);
  s.bias = o.bias;
  s.objective = s.alpha.sum() - 0.5 * s.w.squaredNorm();
  const double wn = s.w.norm();
  s.margin = wn > 0 ? 1.0 / wn : std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n_full; ++i)
    if (s.alpha(i) > kSupportThreshold) s.support_indices.push_back(i);
  s.solver_iterations = o.iterations;
  s.converged = o.converged;
  s.kkt_gap = o.gap;
  s.objective_trace = std::move(o.trace);
  return s;
}

std::optional<Vector> restricted_warm_start(const SmoOptions& opt, const std::vector<Eigen::Index>& rows,
                                            const Vector& y_sub, double c) {
  if (!opt.warm_start) return std::nullopt;
  const Vector& full = *opt.warm_start;
  Vector a(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t] >= full.size()) throw InvalidArgument("warm start is shorter than the dataset");
    a(static_cast<Eigen::Index>(t)) = full(rows[t]);
  }
  if ((a.array() < 0.0).any() || (a.array() > c).any()) throw InvalidArgument("warm start violates 0 <= alpha <= C");
  if (std::abs(a.dot(y_sub)) > 1e-8 * (1.0 + a.sum())) throw InvalidArgument("warm start violates y'alpha = 0");
  return a;
}

}  // namespace

void LabeledDataset::validate() const {
  if (x.rows() < 1 || x.cols() < 1) throw InvalidArgument("dataset must have at least one row and one feature");
  if (y.size() != x.rows()) throw InvalidArgument("label count does not match row count");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) throw InvalidArgument("label " + std::to_string(i) + " is not -1 or +1");
  }
}

bool LabeledDataset::has_both_classes() const {
  return (y.array() > 0).any() && (y.array() < 0).any();
}

SvmDualSolution solve_dual(const LabeledDataset& data, double c, const SmoOptions& options) {
  require_trainable(data, c);
  const auto rows = all_rows(data.n());
  const auto warm = restricted_warm_start(options, rows, data.y, c);
  return finish(run_smo(data.x, data.y, c, options, warm ? &*warm : nullptr), rows, data.n());
}

DistortionMatrix DistortionMatrix::zero(Eigen::Index n, Eigen::Index dim) {
  return {RowMatrix::Zero(n, dim), {}, 0.0};
}

SvmDualSolution solve_reduced_adversarial(const LabeledDataset& data, double c, const LinearReductionMap& projection,
                                          const std::vector<Eigen::Index>& keep, const DistortionMatrix& distortion,
                                          const SmoOptions& options) {
  data.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("SVM constant C must be positive");
  if (projection.cols() != data.d()) {
    throw InvalidArgument("projection has " + std::to_string(projection.cols()) + " columns, data has " +
                          std::to_string(data.d()) + " features");
  }
  if (distortion.d.rows() != data.n() || distortion.d.cols() != data.d()) {
    throw InvalidArgument("distortion matrix shape does not match the data");
  }
  std::vector<Eigen::Index> rows = keep;
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (rows.empty()) throw InvalidArgument("keep set is empty");
  if (rows.front() < 0 || rows.back() >= data.n()) throw InvalidArgument("keep index out of range");

  const auto nk = static_cast<Eigen::Index>(rows.size());
  RowMatrix distorted(nk, data.d());
  Vector y_sub(nk);
  for (Eigen::Index t = 0; t < nk; ++t) {
    distorted.row(t) = data.x.row(rows[static_cast<std::size_t>(t)]) + distortion.d.row(rows[static_cast<std::size_t>(t)]);
    y_sub(t) = data.y(rows[static_cast<std::size_t>(t)]);
  }
  if (!((y_sub.array() > 0).any() && (y_sub.array() < 0).any())) {
    throw InvalidArgument("keep set must contain both classes");
  }
  const RowMatrix effective = apply_map_rows(projection, distorted);
  const auto warm = restricted_warm_start(options, rows, y_sub, c);
  return finish(run_smo(effective, y_sub, c, options, warm ? &*warm : nullptr), rows, data.n());
}

double margin_of(const Vector& w) {
  const double n = w.norm();
  if (!(n > 0.0)) throw DegenerateError("margin undefined: w = 0");
  return 1.0 / n;
}

double margin_of(const SvmDualSolution& solution) { return margin_of(solution.w); }

DistortionMatrix make_distortion(const LabeledDataset& data, const Vector& w, double bias, Eigen::Index k,
                                 double budget) {
  data.validate();
  if (w.size() != data.d()) throw InvalidArgument("make_distortion: w length does not match the data");
  if (k < 0 || k > data.n()) throw InvalidArgument("make_distortion: k must lie in [0, n]");
  if (!(budget >= 0.0)) throw InvalidArgument("make_distortion: budget must be nonnegative");
  const double wn = w.norm();
  if (!(wn > 0.0)) throw InvalidArgument("make_distortion: w must be nonzero");

  DistortionMatrix dist = DistortionMatrix::zero(data.n(), data.d());
  dist.budget = budget;
  if (k == 0 || budget == 0.0) return dist;

  const Vector margins = data.y.cwiseProduct(decision_values(data.x, w, bias));
  std::vector<Eigen::Index> candidates;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (margins(i) > 0.0) candidates.push_back(i);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return margins(a) < margins(b); });
  if (static_cast<Eigen::Index>(candidates.size()) > k) candidates.resize(static_cast<std::size_t>(k));
  std::sort(candidates.begin(), candidates.end());
  const Vector unit = w / wn;
  for (Eigen::Index i : candidates) dist.d.row(i) = (-budget * data.y(i)) * unit.transpose();
  dist.attacked_rows = std::move(candidates);
  return dist;
}

Vector decision_values(const RowMatrix& x, const Vector& w, double bias) {
  if (w.size() != x.cols()) throw InvalidArgument("decision_values: w length does not match the data");
  Vector out(x.rows());
  simd::gemv(x.data(), static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()), w.data(), out.data());
  out.array() += bias;
  return out;
}

double training_accuracy(const LabeledDataset& data, const SvmDualSolution& solution) {
  const Vector f = decision_values(data.x, solution.w, solution.bias);
  Eigen::Index ok = 0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if ((f(i) >= 0 ? 1.0 : -1.0) == data.y(i)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(data.n());
}

std::vector<Eigen::Index> all_rows(Eigen::Index n) {
  std::vector<Eigen::Index> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), Eigen::Index{0});
  return r;
}

LabeledDataset gen_synth(Eigen::Index n, Eigen::Index d, double separation, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("gen_synth: n must be a positive even number");
  if (d < 1) throw InvalidArgument("gen_synth: d must be positive");
  if (!(separation > 0.0)) throw InvalidArgument("gen_synth: separation must be positive");
  LabeledDataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = rng.normal();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double label = i < n / 2 ? 1.0 : -1.0;
    data.y(i) = label;
    data.x(i, 0) += label * separation / 2.0;
  }
  return data;
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw ParseError(file, 0, "cannot open file");
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!io::trim(line).empty()) {
      header = io::split(line, ',');
      break;
    }
  }
  if (header.empty()) throw ParseError(file, lineno, "empty dataset file");
  if (header.size() < 2 || header.back() != "label") {
    throw ParseError(file, lineno, "header must be f1,...,fd,label");
  }
  const std::size_t d = header.size() - 1;
  std::vector<double> values;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::trim(line).empty()) continue;
    const auto toks = io::split(line, ',');
    if (toks.size() != d + 1) {
      throw ParseError(file, lineno, "expected " + std::to_string(d + 1) + " fields, got " + std::to_string(toks.size()));
    }
    for (std::size_t j = 0; j < d; ++j) values.push_back(io::parse_real(toks[j], file, lineno));
    const double label = io::parse_real(toks[d], file, lineno);
    if (label != 1.0 && label != -1.0) throw ParseError(file, lineno, "label must be -1 or +1, got " + toks[d]);
    labels.push_back(label);
  }
  if (labels.empty()) throw ParseError(file, lineno, "dataset has no rows");
  LabeledDataset data;
  data.x = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(d));
  data.y = Eigen::Map<Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return data;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  data.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  for (Eigen::Index j = 0; j < data.d(); ++j) out << 'f' << (j + 1) << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.d(); ++j) out << io::format_real(data.x(i, j)) << ',';
    out << (data.y(i) > 0 ? "1" : "-1") << '\n';
  }
}

}  // namespace gamered
