#include <limits>
#include <ssm/detectors.hpp>
#include <ssm/errors.hpp>
#include <ssm/sm_link.hpp>

namespace ssm {
namespace {

struct MatchedFilter
{
    ComplexVector z;     // h_j^H y
    RealVector energy;   // ||h_j||^2
    std::int64_t cms = 0;
};

MatchedFilter matched_filter(const ComplexVector& y, const ComplexMatrix& h)
{
    if (y.size() != h.rows()) throw DimensionMismatchError("y length != N_r");
    const Eigen::Index n_t = h.cols();
    const Eigen::Index n_r = h.rows();
    MatchedFilter mf;
    mf.z.resize(n_t);
    mf.energy.resize(n_t);
    for (Eigen::Index j = 0; j < n_t; ++j) {
        cdouble acc = 0.0;
        double e = 0.0;
        for (Eigen::Index r = 0; r < n_r; ++r) {
            acc += std::conj(h(r, j)) * y(r);
            e += std::norm(h(r, j));
        }
        mf.z(j) = acc;
        mf.energy(j) = e;
    }
    mf.cms = 2 * n_t * n_r;
    return mf;
}

void require_nonzero_columns(const MatchedFilter& mf)
{
    for (Eigen::Index j = 0; j < mf.energy.size(); ++j) {
        if (!(mf.energy(j) > 0)) throw ZeroColumnError("channel column " + std::to_string(j) + " is zero");
    }
}

DetectionResult finish(const ComplexVector& y, int n_t, const Constellation& c, int antenna, int point,
                       double expanded_metric, std::int64_t cms)
{
    DetectionResult r;
    r.antenna = antenna;
    r.point_index = point;
    r.bits = unmap_bits(antenna, point, n_t, c);
    r.cm_count = cms;
    r.metric = y.squaredNorm() + expanded_metric;
    return r;
}

} // namespace

DetectionResult detect_joint_ml(const ComplexVector& y, const ComplexMatrix& h_eff, const Constellation& c)
{
    const MatchedFilter mf = matched_filter(y, h_eff);
    const int n_t = static_cast<int>(h_eff.cols());
    const int order = c.order();
    std::int64_t cms = mf.cms;

    RealVector energy(order);
    for (int m = 0; m < order; ++m) energy(m) = std::norm(c.point(m));
    cms += order;

    int best_j = 0, best_m = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_t; ++j) {
        for (int m = 0; m < order; ++m) {
            const double d = energy(m) * mf.energy(j) - 2.0 * (std::conj(c.point(m)) * mf.z(j)).real();
            if (d < best) {
                best = d;
                best_j = j;
                best_m = m;
            }
        }
    }
    cms += 2ll * n_t * order;
    return finish(y, n_t, c, best_j, best_m, best, cms);
}

DetectionResult detect_proposed(const ComplexVector& y, const ComplexMatrix& h_eff, const Constellation& c)
{
    const MatchedFilter mf = matched_filter(y, h_eff);
    require_nonzero_columns(mf);
    const int n_t = static_cast<int>(h_eff.cols());
    const RealVector& energies = c.energies();
    std::int64_t cms = mf.cms;

    int best_j = 0, best_m = 0;
    double d_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_t; ++j) {
        const cdouble g = mf.z(j) / mf.energy(j);
        const DemapResult x = c.demap_nearest(g);
        cms += c.bits_per_symbol();
        const double d = energies(x.index) * mf.energy(j) - 2.0 * (std::conj(x.point) * mf.z(j)).real();
        cms += 2;
        // Full traversal: stopping at the first improvement would lose ML optimality.
        if (d < d_min) {
            d_min = d;
            best_j = j;
            best_m = x.index;
        }
    }
    return finish(y, n_t, c, best_j, best_m, d_min, cms);
}

DetectionResult detect_suboptimal(const ComplexVector& y, const ComplexMatrix& h_eff, const Constellation& c)
{
    const MatchedFilter mf = matched_filter(y, h_eff);
    require_nonzero_columns(mf);
    const int n_t = static_cast<int>(h_eff.cols());
    std::int64_t cms = mf.cms;

    int best_j = 0;
    double best_score = -1.0;
    for (int j = 0; j < n_t; ++j) {
        const double score = std::norm(mf.z(j)) / mf.energy(j);
        if (score > best_score) {
            best_score = score;
            best_j = j;
        }
    }
    cms += n_t;

    const cdouble g = mf.z(best_j) / mf.energy(best_j);
    int best_m = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int m = 0; m < c.order(); ++m) {
        const double d = std::norm(g - c.point(m));
        if (d < best_d) {
            best_d = d;
            best_m = m;
        }
    }
    cms += c.order();

    const cdouble x = c.point(best_m);
    const double expanded = std::norm(x) * mf.energy(best_j) - 2.0 * (std::conj(x) * mf.z(best_j)).real();
    return finish(y, n_t, c, best_j, best_m, expanded, cms);
}

std::int64_t cm_formula_joint_ml(int n_t, int n_r, int order)
{
    return 2ll * n_t * n_r + 2ll * n_t * order + order;
}

std::int64_t cm_formula_proposed(int n_t, int n_r, int order)
{
    return 2ll * n_t * n_r + static_cast<std::int64_t>(n_t) * ilog2_exact(order) + 2ll * n_t;
}

std::int64_t cm_formula_suboptimal(int n_t, int n_r, int order)
{
    return 2ll * n_t * n_r + n_t + order;
}

} // namespace ssm
