#include "stw/noise.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace stw {

NoiseModel::NoiseModel(const SpatialGrid& grid, std::size_t K, double sigma, double r)
    : grid_(grid), K_(K), sigma_(sigma), r_(r) {
    if (K == 0 || K > grid.size() - 2)
        throw std::invalid_argument(
            "NoiseModel: mode count must be in [1, n-2] for discrete orthonormality");
    if (!(r >= 2.0))
        throw std::invalid_argument(
            "NoiseModel: spectral exponent r >= 2 required for H^1 regularity");
    if (!(sigma >= 0.0))
        throw std::invalid_argument("NoiseModel: sigma must be nonnegative");

    const double L = grid.half_width();
    const double inv_sqrt_L = 1.0 / std::sqrt(L);
    modes_.resize(K);
    q_.resize(K);
    for (std::size_t k = 1; k <= K; ++k) {
        GridVector& e = modes_[k - 1];
        e.resize(grid.size());
        const double freq = static_cast<double>(k) * M_PI / (2.0 * L);
        for (std::size_t i = 0; i < grid.size(); ++i)
            e[i] = std::sin(freq * (grid.x(i) + L)) * inv_sqrt_L;
        e.front() = 0.0;
        e.back() = 0.0;
        const double lam = 1.0 + freq * freq;
        q_[k - 1] = sigma * sigma * std::pow(lam, -r);
        trace_ += q_[k - 1];
        hs_h1_ += q_[k - 1] * lam;
    }
}

GridVector NoiseModel::mode_shifted(std::size_t k, double shift) const {
    if (k >= K_) throw std::out_of_range("NoiseModel::mode_shifted: mode index");
    const double L = grid_.half_width();
    const double freq = static_cast<double>(k + 1) * M_PI / (2.0 * L);
    const double inv_sqrt_L = 1.0 / std::sqrt(L);
    GridVector out(grid_.size(), 0.0);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double x = grid_.x(i) + shift;
        if (x < -L || x > L) continue;
        out[i] = std::sin(freq * (x + L)) * inv_sqrt_L;
    }
    return out;
}

double NoiseModel::covariance_quadratic_form(const GridVector& phi) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < K_; ++k) {
        const double p = inner_dx(grid_, phi, modes_[k]);
        acc += q_[k] * p * p;
    }
    return acc;
}

NoiseModel build_noise(const SpatialGrid& grid, std::size_t K, double sigma, double r) {
    return NoiseModel(grid, K, sigma, r);
}

IncrementStream::IncrementStream(const NoiseModel& model, std::size_t n_steps,
                                 double dt, PathSeed seed)
    : model_(&model), n_steps_(n_steps), dt_(dt), seed_(seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("IncrementStream: dt must be positive");
}

const Increment& IncrementStream::at(std::size_t n) const {
    if (n >= n_steps_) throw std::out_of_range("IncrementStream: step index");
    if (n == cached_step_) return cache_;

    const std::size_t K = model_->K();
    const std::size_t sz = model_->grid().size();
    cache_.xi.assign(K, 0.0);
    cache_.w.assign(sz, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const double xi = rng::standard_normal(seed_.master_seed, seed_.path_index, n, k);
        cache_.xi[k] = xi;
        const double amp = std::sqrt(model_->q(k) * dt_) * xi;
        if (amp == 0.0) continue;
        const GridVector& e = model_->mode(k);
        for (std::size_t i = 0; i < sz; ++i) cache_.w[i] += amp * e[i];
    }
    cached_step_ = n;
    return cache_;
}

IncrementStream sample_increments(const NoiseModel& model, std::size_t n_steps,
                                  double dt, PathSeed seed) {
    return IncrementStream(model, n_steps, dt, seed);
}

double pair_with(const SpatialGrid& grid, const GridVector& phi, const GridVector& dw) {
    if (phi.size() != grid.size() || dw.size() != grid.size())
        throw std::invalid_argument("pair_with: grid mismatch");
    return inner_dx(grid, phi, dw);
}

double pair_with(const SpatialGrid& grid, const GridVector& phi, const GridVector& dw,
                 const GridVector& weight) {
    if (phi.size() != grid.size() || dw.size() != grid.size() ||
        weight.size() != grid.size())
        throw std::invalid_argument("pair_with: grid mismatch");
    return inner_weighted(grid, phi, dw, weight);
}

std::uint64_t grid_hash(const SpatialGrid& grid) {
    // FNV-1a over the defining scalars
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    const double L = grid.half_width();
    const std::uint64_t n = grid.size();
    mix(&L, sizeof L);
    mix(&n, sizeof n);
    return h;
}

namespace {

struct DumpHeader {
    char magic[8];
    std::uint32_t version;
    std::uint32_t K;
    std::uint64_t grid;
    double dt;
    std::uint64_t n_steps;
    std::uint64_t master_seed;
    std::uint64_t path_index;
};
constexpr char kMagic[8] = {'S', 'T', 'W', 'N', 'O', 'I', 'S', 'E'};

} // namespace

void dump_increments(std::ostream& os, const IncrementStream& stream) {
    DumpHeader h{};
    std::memcpy(h.magic, kMagic, 8);
    h.version = 1;
    h.K = static_cast<std::uint32_t>(stream.model().K());
    h.grid = grid_hash(stream.model().grid());
    h.dt = stream.dt();
    h.n_steps = stream.n_steps();
    h.master_seed = stream.seed().master_seed;
    h.path_index = stream.seed().path_index;
    os.write(reinterpret_cast<const char*>(&h), sizeof h);
    for (std::size_t n = 0; n < stream.n_steps(); ++n) {
        const GridVector& w = stream.at(n).w;
        os.write(reinterpret_cast<const char*>(w.data()),
                 static_cast<std::streamsize>(w.size() * sizeof(double)));
    }
}

std::vector<GridVector> load_increments(std::istream& is, const NoiseModel& model) {
    DumpHeader h{};
    is.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!is || std::memcmp(h.magic, kMagic, 8) != 0 || h.version != 1)
        throw std::runtime_error("load_increments: bad header");
    if (h.grid != grid_hash(model.grid()) || h.K != model.K())
        throw std::runtime_error("load_increments: model mismatch");
    std::vector<GridVector> out(h.n_steps, GridVector(model.grid().size()));
    for (auto& w : out) {
        is.read(reinterpret_cast<char*>(w.data()),
                static_cast<std::streamsize>(w.size() * sizeof(double)));
        if (!is) throw std::runtime_error("load_increments: truncated stream");
    }
    return out;
}

} // namespace stw
