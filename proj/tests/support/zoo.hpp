#pragma once

// The standard model zoo shared by unit and acceptance tests.

#include <string>
#include <vector>

#include "posdyn/cocycle.hpp"
#include "posdyn/leslie.hpp"
#include "posdyn/torus_example.hpp"

namespace zoo {

using namespace posdyn;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

struct NamedMatrixModel {
  std::string name;
  MatrixModel model;
};

struct NamedOdeModel {
  std::string name;
  OdeModel model;
};

inline std::vector<NamedMatrixModel> matrix_models() {
  std::vector<NamedMatrixModel> out;
  out.push_back({"iid-uniform-3", MatrixModel::iid_uniform_entries(mat({{0.5, 0.1, 0.2}, {0.1, 0.4, 0.3}, {0.2, 0.2, 0.6}}),
                                                                    mat({{1.5, 0.9, 0.8}, {0.7, 1.2, 1.0}, {0.9, 0.6, 1.4}}))});
  out.push_back({"iid-list-2", MatrixModel::iid_list({mat({{2.0, 1.0}, {0.5, 1.0}}), mat({{0.5, 0.2}, {1.0, 0.8}})},
                                                     {0.5, 0.5})});
  out.push_back({"markov-list-2", MatrixModel::markov_list(mat({{0.9, 0.1}, {0.3, 0.7}}),
                                                           {mat({{2.0, 1.0}, {0.5, 1.0}}), mat({{0.5, 0.2}, {1.0, 0.8}})})});
  out.push_back({"leslie-3", leslie_model({ParamDistribution::uniform(0.1, 0.5), ParamDistribution::uniform(0.8, 1.6),
                                           ParamDistribution::lognormal(0.0, 0.3)},
                                          {ParamDistribution::uniform(0.6, 0.9), ParamDistribution::uniform(0.4, 0.8)})});
  return out;
}

inline std::vector<NamedOdeModel> ode_models() {
  std::vector<NamedOdeModel> out;
  out.push_back({"piecewise-iid-3",
                 OdeModel::iid_piecewise({mat({{-1.0, 0.5, 0.2}, {0.3, -0.5, 0.4}, {0.6, 0.1, -2.0}}),
                                          mat({{0.2, 1.0, 0.1}, {0.2, -1.0, 0.7}, {0.1, 0.9, -0.3}})},
                                         {0.6, 0.4})});
  out.push_back({"piecewise-markov-2",
                 OdeModel::markov_piecewise(mat({{0.8, 0.2}, {0.4, 0.6}}),
                                            {mat({{-0.5, 1.0}, {0.3, -1.0}}), mat({{0.4, 0.2}, {0.9, -0.2}})})});
  out.push_back({"torus-trig-2", OdeModel::torus_trig(mat({{-1.0, 0.8}, {0.6, -0.5}}), mat({{0.5, 0.3}, {0.2, 0.0}}),
                                                      mat({{0.0, 0.1}, {0.3, 0.4}}))});
  out.push_back({"constant-3", OdeModel::constant(mat({{-0.3, 0.2, 0.5}, {0.1, -0.2, 0.3}, {0.4, 0.6, -1.0}}))});
  out.push_back({"torus-example", torus_example_model()});
  return out;
}

/// A type-K system over the i.i.d. piecewise driver, K = {1, 2}, L = {3}.
inline OdeModel typek_model() {
  const OdeModel base = OdeModel::iid_piecewise(
      {mat({{-0.5, 0.4, -0.3}, {0.2, -1.0, -0.6}, {-0.7, -0.1, 0.2}}),
       mat({{0.1, 0.9, -0.2}, {0.5, -0.3, -0.4}, {-0.2, -0.8, -0.6}})},
      {0.5, 0.5});
  return base.with_cone(Cone::type_k(2, 1), "type-k piecewise");
}

}  // namespace zoo
