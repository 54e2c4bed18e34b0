#include "qpat/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace qpat
{
namespace
{
std::atomic<int> g_threads{1};
}

void set_thread_count(int n)
{
    g_threads = std::max(1, n);
}

int thread_count()
{
    return g_threads;
}

}  // namespace qpat
