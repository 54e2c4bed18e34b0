#include "qpat/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace qpat
{
namespace
{
GaussRule make_rule(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter)
        {
            // Three-term recurrence for P_n and its derivative
            double p0 = 1;
            double p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            double pn = n == 1 ? x : p1;
            double pm = n == 1 ? 1 : p0;
            dp = n * (x * pn - pm) / (x * x - 1);
            double dx = pn / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16)
            {
                break;
            }
        }
        // Recompute derivative at the converged node
        double p0 = 1;
        double p1 = x;
        for (int k = 2; k <= n; ++k)
        {
            double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        double pn = n == 1 ? x : p1;
        double pm = n == 1 ? 1 : p0;
        dp = n * (x * pn - pm) / (x * x - 1);
        double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
    {
        rule.nodes[n / 2] = 0;
    }
    return rule;
}
}  // namespace

GaussRule const& gauss_legendre(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    if (n < 1)
    {
        throw PreconditionError("Gauss-Legendre rule needs at least one node");
    }
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot)
    {
        slot = std::make_unique<GaussRule>(make_rule(n));
    }
    return *slot;
}

}  // namespace qpat
