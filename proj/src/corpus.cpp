#include "fklab/corpus.hpp"

#include <cmath>

#include "fklab/oracle.hpp"

namespace fklab {
namespace corpus {

namespace {

FkModel homogeneous(int horizon, int d, Matrix step, Vector potential, Vector initial) {
    FkModel m;
    m.horizon = horizon;
    m.space_sizes.assign(horizon + 1, d);
    m.kernels.assign(horizon, step);
    m.potentials.assign(horizon + 1, potential);
    m.initial = std::move(initial);
    m.validate();
    return m;
}

Matrix matrix2(double a00, double a01, double a10, double a11) {
    Matrix m(2, 2);
    m(0, 0) = a00;
    m(0, 1) = a01;
    m(1, 0) = a10;
    m(1, 1) = a11;
    return m;
}

}  // namespace

FkModel unit_potential_2state(int horizon) {
    return homogeneous(horizon, 2, matrix2(0.7, 0.3, 0.4, 0.6), {1.0, 1.0}, {0.5, 0.5});
}

FkModel mixing_2state(int horizon) {
    return homogeneous(horizon, 2, matrix2(0.85, 0.15, 0.20, 0.80), {1.08, 0.92}, {0.6, 0.4});
}

FkModel weak_mixing_3state(int horizon) {
    Matrix m(3, 3);
    const double rows[3][3] = {{0.85, 0.10, 0.05}, {0.05, 0.85, 0.10}, {0.10, 0.05, 0.85}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = rows[r][c];
    return homogeneous(horizon, 3, std::move(m), {1.0, 1.1, 0.9},
                       {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

FkModel qmc_4state(int horizon) {
    Matrix m(4, 4);
    const double rows[4][4] = {{0.75, 0.25, 0.0, 0.0},
                               {0.25, 0.5, 0.25, 0.0},
                               {0.0, 0.25, 0.5, 0.25},
                               {0.0, 0.0, 0.25, 0.75}};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = rows[r][c];
    const double dt = 0.5;
    Vector g(4);
    for (int x = 0; x < 4; ++x) g[x] = std::exp(-0.4 * x * dt);
    return homogeneous(horizon, 4, std::move(m), std::move(g), {0.25, 0.25, 0.25, 0.25});
}

FkModel normalized(const FkModel& model) {
    return normalize_potentials(model, oracle::exact_measures(model).eta);
}

std::vector<std::pair<std::string, FkModel>> all(int horizon) {
    return {
        {"corpus_i", unit_potential_2state(horizon)},
        {"corpus_ii", mixing_2state(horizon)},
        {"corpus_iii", weak_mixing_3state(horizon)},
        {"corpus_iv", qmc_4state(horizon)},
    };
}

}  // namespace corpus
}  // namespace fklab
