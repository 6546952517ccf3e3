#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "posdyn/matrix_cocycle.hpp"

namespace posdyn {
namespace {

std::vector<Matrix> sampled_products(const MatrixModel& model, const MatrixCheckOptions& opts) {
  if (opts.n_samples < 1) throw PreconditionError("assumption check: n_samples must be >= 1");
  if (opts.lag < 1) throw PreconditionError("assumption check: lag must be >= 1");
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(opts.n_samples));
  for (int k = 0; k < opts.n_samples; ++k) {
    out.push_back(lag_product(model, sample_point(model.driver(), opts.seed, static_cast<std::uint64_t>(k)), opts.lag));
  }
  return out;
}

std::string lag_suffix(int lag) { return lag == 1 ? std::string() : " (on S^(" + std::to_string(lag) + "))"; }

// First entry violating pred, as a witness.
template <typename Pred>
bool find_entry(const std::vector<Matrix>& mats, Pred bad, const char* what, AssumptionReport& rep) {
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const Matrix& m = mats[k];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (bad(m(i, j))) {
          rep.verdict = Verdict::Fails;
          rep.witnesses.push_back(Witness{what, static_cast<int>(k), static_cast<int>(i) + 1, static_cast<int>(j) + 1, 0.0, m(i, j)});
          return true;
        }
      }
    }
  }
  return false;
}

template <typename Metric>
AssumptionReport moment_report(std::string id, std::string note, const std::vector<Matrix>& mats, bool certain,
                               Metric metric) {
  AssumptionReport rep;
  rep.id = std::move(id);
  rep.note = std::move(note);
  std::vector<double> values;
  values.reserve(mats.size());
  for (const auto& m : mats) values.push_back(metric(m));
  rep.has_estimate = true;
  rep.estimate = mean_ci(values);
  const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (constant && std::isfinite(values.front())) rep.estimate.half_width = 0.0;
  // A constant model has a deterministic, finite moment: integrability is certain.
  rep.verdict = std::isfinite(rep.estimate.mean) ? (certain ? Verdict::Holds : Verdict::Empirical) : Verdict::Fails;
  if (rep.verdict == Verdict::Fails) rep.witnesses.push_back(Witness{"non-finite sample moment", -1, -1, -1, 0.0, rep.estimate.mean});
  return rep;
}

double max_log_spread(const Vector& hi, const Vector& lo) {
  return (hi.array().log() - lo.array().log()).maxCoeff();
}

}  // namespace

std::vector<AssumptionReport> check_D1(const MatrixModel& model, const MatrixCheckOptions& opts) {
  const auto mats = sampled_products(model, opts);
  const std::string sfx = lag_suffix(opts.lag);
  std::vector<AssumptionReport> out;

  AssumptionReport nonneg{"D1.i", Verdict::Holds, "s_ij >= 0 on every sample" + sfx};
  find_entry(mats, [](double v) { return v < 0.0; }, "negative entry", nonneg);
  out.push_back(nonneg);

  AssumptionReport inj{"D1.ii", Verdict::Holds,
                       "reciprocal condition number > 1e-12 on every sample" + sfx};
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const double rc = reciprocal_condition(mats[k]);
    if (!(rc > kNonsingularRcond)) {
      inj.verdict = Verdict::Fails;
      inj.witnesses.push_back(Witness{"singular sample (value = det)", static_cast<int>(k), -1, -1, 0.0, mats[k].determinant()});
      break;
    }
  }
  out.push_back(inj);

  if (nonneg.verdict == Verdict::Fails) {
    AssumptionReport integ{"D1.iii", Verdict::Fails, "requires D1.i"};
    integ.witnesses = nonneg.witnesses;
    out.push_back(integ);
  } else {
    out.push_back(moment_report("D1.iii", "mean of ln+ M" + sfx, mats, model.is_constant(),
                                [](const Matrix& m) { return log_plus(m.maxCoeff()); }));
  }
  return out;
}

std::vector<AssumptionReport> check_D2(const MatrixModel& model, const MatrixCheckOptions& opts) {
  const auto mats = sampled_products(model, opts);
  const std::string sfx = lag_suffix(opts.lag);

  AssumptionReport positivity{"positivity", Verdict::Holds, ""};
  find_entry(mats, [](double v) { return !(v > 0.0); }, "entry not strictly positive", positivity);

  std::vector<AssumptionReport> out;
  auto with_positivity = [&](std::string id, std::string note, auto metric) {
    if (positivity.verdict == Verdict::Fails) {
      AssumptionReport r{std::move(id), Verdict::Fails, "s_ij > 0 fails" + sfx};
      r.witnesses = positivity.witnesses;
      out.push_back(std::move(r));
    } else {
      out.push_back(moment_report(std::move(id), std::move(note) + sfx, mats, model.is_constant(), metric));
    }
  };

  with_positivity("D2.i", "mean of max_i ln+(ln M_c,i - ln m_c,i)", [](const Matrix& m) {
    const MatrixStats st = matrix_stats(m);
    return log_plus(max_log_spread(st.col_max, st.col_min));
  });
  with_positivity("D2.ii", "mean of max_i ln+(ln M_r,i - ln m_r,i)", [](const Matrix& m) {
    const MatrixStats st = matrix_stats(m);
    return log_plus(max_log_spread(st.row_max, st.row_min));
  });
  with_positivity("D2.iii", "mean of max_i max(ln M_c,i - ln m_c,i, ln M_r,i - ln m_r,i)", [](const Matrix& m) {
    const MatrixStats st = matrix_stats(m);
    return std::max(max_log_spread(st.col_max, st.col_min), max_log_spread(st.row_max, st.row_min));
  });
  with_positivity("D2.sufficient.i", "mean of ln+(ln M - ln m); implies D2.i-ii", [](const Matrix& m) {
    return log_plus(std::log(m.maxCoeff()) - std::log(m.minCoeff()));
  });
  with_positivity("D2.sufficient.ii", "mean of ln M - ln m; implies D2.iii", [](const Matrix& m) {
    return std::log(m.maxCoeff()) - std::log(m.minCoeff());
  });
  return out;
}

std::vector<AssumptionReport> check_D3(const MatrixModel& model, const MatrixCheckOptions& opts) {
  const auto mats = sampled_products(model, opts);
  const std::string sfx = lag_suffix(opts.lag);
  std::vector<AssumptionReport> out;

  auto sum_condition = [&](std::string id, bool rows) {
    for (std::size_t k = 0; k < mats.size(); ++k) {
      const MatrixStats st = matrix_stats(mats[k]);
      const double v = rows ? st.min_row_sum : st.min_col_sum;
      if (!(v > 0.0)) {
        AssumptionReport r{std::move(id), Verdict::Fails, rows ? "m_r > 0 fails" : "m_c > 0 fails"};
        r.witnesses.push_back(Witness{rows ? "min row sum" : "min column sum", static_cast<int>(k), -1, -1, 0.0, v});
        out.push_back(std::move(r));
        return;
      }
    }
    out.push_back(moment_report(std::move(id), std::string(rows ? "mean of ln- m_r" : "mean of ln- m_c") + sfx, mats, model.is_constant(),
                                [rows](const Matrix& m) {
                                  const MatrixStats st = matrix_stats(m);
                                  return log_minus(rows ? st.min_row_sum : st.min_col_sum);
                                }));
  };
  sum_condition("D3.i", true);
  sum_condition("D3.ii", false);

  AssumptionReport positivity{"D3.sufficient", Verdict::Holds, ""};
  if (find_entry(mats, [](double v) { return !(v > 0.0); }, "entry not strictly positive", positivity)) {
    positivity.note = "requires s_ij > 0" + sfx;
    out.push_back(positivity);
  } else {
    out.push_back(moment_report("D3.sufficient", "mean of ln- m; implies D3.i-ii" + sfx, mats, model.is_constant(),
                                [](const Matrix& m) { return log_minus(m.minCoeff()); }));
  }
  return out;
}

}  // namespace posdyn
