#include "cfmimo/rate_model.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

namespace cfmimo {

namespace {

void check_dims(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p)
{
    if (beta.rows() != gamma.rows() || beta.cols() != gamma.cols() ||
        static_cast<std::size_t>(beta.cols()) != p.size())
    {
        throw InvalidInput("rate model: beta, gamma and the pilot assignment disagree in shape");
    }
}

} // namespace

SinrTerms sinr_terms(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p)
{
    check_dims(beta, gamma, p);
    const Eigen::Index K = beta.cols();

    SinrTerms t;
    const Eigen::VectorXd column_sums = gamma.colwise().sum().transpose();
    t.noise = column_sums;
    t.signal = column_sums.array().square();
    t.leakage = gamma.transpose() * beta;

    t.copilot = Eigen::MatrixXd::Zero(K, K);
    if (!p.oracle)
    {
        const Eigen::MatrixXd ratio = gamma.array() / beta.array();
        for (Eigen::Index k = 0; k < K; ++k)
        {
            for (Eigen::Index j = 0; j < K; ++j)
            {
                if (j == k || p.pilots[static_cast<std::size_t>(j)] != p.pilots[static_cast<std::size_t>(k)])
                    continue;
                const double coherent = ratio.col(k).dot(beta.col(j));
                t.copilot(k, j) = coherent * coherent;
            }
        }
    }
    return t;
}

Eigen::VectorXd uplink_sinr(const SinrTerms& terms, const Eigen::VectorXd& eta, double uplink_snr)
{
    const Eigen::Index K = terms.signal.size();
    if (eta.size() != K)
        throw InvalidInput("uplink_sinr: eta has the wrong length");

    const Eigen::VectorXd interference =
        uplink_snr * (terms.copilot * eta + terms.leakage * eta) + terms.noise;
    Eigen::VectorXd sinr(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double num = uplink_snr * eta(k) * terms.signal(k);
        sinr(k) = num > 0.0 ? num / interference(k) : 0.0;
    }
    return sinr;
}

Eigen::VectorXd uplink_sinr(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p,
                            const Eigen::VectorXd& eta, double uplink_snr)
{
    return uplink_sinr(sinr_terms(beta, gamma, p), eta, uplink_snr);
}

double spectral_efficiency(double sinr)
{
    return std::log2(1.0 + sinr);
}

double throughput(double sinr, const SimConfig& cfg)
{
    const double data_fraction = 1.0 - static_cast<double>(cfg.num_pilots) / cfg.coherence_len;
    return cfg.bandwidth * (data_fraction / 2.0) * spectral_efficiency(sinr);
}

double sum_rate(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma, const PilotAssignment& p,
                const Eigen::VectorXd& eta, double uplink_snr)
{
    const Eigen::VectorXd sinr = uplink_sinr(beta, gamma, p, eta, uplink_snr);
    double total = 0.0;
    for (Eigen::Index k = 0; k < sinr.size(); ++k)
        total += spectral_efficiency(sinr(k));
    return total;
}

RateReport rate_report(const Eigen::VectorXd& sinr, const SimConfig& cfg)
{
    RateReport r;
    r.sinr = sinr;
    r.rate = sinr.unaryExpr([](double s) { return spectral_efficiency(s); });
    r.throughput = sinr.unaryExpr([&](double s) { return throughput(s, cfg); });
    return r;
}

EmpiricalSinr validate_sinr_empirically(const Eigen::MatrixXd& beta, const PilotAssignment& p, const SimConfig& cfg,
                                        const Eigen::VectorXd& eta, std::size_t num_samples, std::uint64_t seed)
{
    using cd = std::complex<double>;
    const Eigen::Index M = beta.rows();
    const Eigen::Index K = beta.cols();
    if (static_cast<std::size_t>(K) != p.size() || eta.size() != K)
        throw InvalidInput("validate_sinr_empirically: shape mismatch");
    if (num_samples == 0)
        throw InvalidInput("validate_sinr_empirically: need at least one sample");

    const double rho_p = pilot_snr(cfg);
    const double rho_u = uplink_snr(cfg);
    const double amplitude = std::sqrt(cfg.num_pilots * rho_p);
    const EstimationQuality est = estimation_quality(beta, p, cfg.num_pilots, rho_p);

    // Oracle mode: every UE gets a private pilot, so a private noise projection.
    const Eigen::Index num_books = p.oracle ? K : cfg.num_pilots;
    std::vector<Eigen::Index> book(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k)
        book[static_cast<std::size_t>(k)] = p.oracle ? k : p.pilots[static_cast<std::size_t>(k)];

    Rng rng(seed);
    std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
    const auto cn = [&] { return cd(unit(rng), unit(rng)); };

    const Eigen::MatrixXd beta_sqrt = beta.array().sqrt();
    Eigen::MatrixXcd g(M, K);
    Eigen::MatrixXcd received(M, num_books);
    Eigen::MatrixXcd ghat(M, K);

    // cross(k, j) accumulates sum_m g_mj conj(ghat_mk).
    Eigen::MatrixXcd cross_sum = Eigen::MatrixXcd::Zero(K, K);
    Eigen::MatrixXd cross_power = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd noise_sum = Eigen::VectorXd::Zero(K);

    for (std::size_t s = 0; s < num_samples; ++s)
    {
        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index m = 0; m < M; ++m)
                g(m, k) = beta_sqrt(m, k) * cn();
        for (Eigen::Index b = 0; b < num_books; ++b)
            for (Eigen::Index m = 0; m < M; ++m)
                received(m, b) = cn();
        for (Eigen::Index k = 0; k < K; ++k)
            received.col(book[static_cast<std::size_t>(k)]) += amplitude * g.col(k);
        for (Eigen::Index k = 0; k < K; ++k)
            ghat.col(k) = est.c.col(k).cast<cd>().cwiseProduct(received.col(book[static_cast<std::size_t>(k)]));

        // adjoint() conjugates ghat: cross(k, j) = sum_m conj(ghat_mk) g_mj.
        const Eigen::MatrixXcd cross = ghat.adjoint() * g;
        cross_sum += cross;
        cross_power += cross.cwiseAbs2();
        noise_sum += ghat.colwise().squaredNorm().transpose();
    }

    const double n = static_cast<double>(num_samples);
    EmpiricalSinr out;
    out.low_sample_warning = num_samples < 1000;
    out.sinr.resize(K);
    out.desired.resize(K);
    out.beamforming.resize(K);
    out.interference.resize(K);
    out.copilot_coherent.resize(K);
    out.noise = noise_sum / n;
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const cd mean_self = cross_sum(k, k) / n;
        const double self_power = cross_power(k, k) / n;
        out.desired(k) = rho_u * eta(k) * std::norm(mean_self);
        out.beamforming(k) = rho_u * eta(k) * std::max(0.0, self_power - std::norm(mean_self));
        double inter = 0.0;
        double coherent = 0.0;
        for (Eigen::Index j = 0; j < K; ++j)
        {
            if (j == k)
                continue;
            inter += eta(j) * cross_power(k, j) / n;
            coherent += eta(j) * std::norm(cross_sum(k, j) / n);
        }
        out.interference(k) = rho_u * inter;
        out.copilot_coherent(k) = rho_u * coherent;
        out.sinr(k) = out.desired(k) / (out.beamforming(k) + out.interference(k) + out.noise(k));
    }
    return out;
}

EmpiricalSinr validate_sinr_empirically(const Eigen::MatrixXd& beta, const PilotAssignment& p, const SimConfig& cfg,
                                        std::size_t num_samples, std::uint64_t seed)
{
    return validate_sinr_empirically(beta, p, cfg, Eigen::VectorXd::Ones(beta.cols()), num_samples, seed);
}

} // namespace cfmimo
