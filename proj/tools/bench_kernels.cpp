// Times the OpenMP kernels against the serial reference and checks that the
// two produce bitwise-identical results on the same inputs.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include "swimpose/kernels.hpp"

using swimpose::Tensor;
namespace k = swimpose::kernels;

namespace {

Tensor random_tensor(int c, int h, int w, std::mt19937_64& rng) {
    Tensor t(c, h, w);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
    return t;
}

std::vector<double> random_vec(size_t n, std::mt19937_64& rng) {
    std::vector<double> v(n);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& x : v) x = dist(rng);
    return v;
}

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

int failures = 0;

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
    if (!match) ++failures;
    std::printf("%-28s %10.3f %10.3f %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, match ? "bitwise equal" : "MISMATCH");
}

void bench_conv(int in_c, int out_c, int size, int ksz, int reps, std::mt19937_64& rng) {
    const Tensor in = random_tensor(in_c, size, size, rng);
    const auto W = random_vec(static_cast<size_t>(out_c) * in_c * ksz * ksz, rng);
    const auto b = random_vec(out_c, rng);
    Tensor out_s(out_c, size, size), out_p(out_c, size, size);

    char name[64];
    std::snprintf(name, sizeof(name), "conv %dx%d %d->%dc %dx%d", ksz, ksz, in_c, out_c,
                  size, size);
    const double ts =
        time_ms([&] { k::serial::conv2d_forward(in, W, b, out_c, ksz, out_s); }, reps);
    const double tp = time_ms([&] { k::conv2d_forward(in, W, b, out_c, ksz, out_p); }, reps);
    row(name, ts, tp, out_s == out_p);

    const Tensor d_out = random_tensor(out_c, size, size, rng);
    Tensor din_s(in_c, size, size), din_p(in_c, size, size);
    std::snprintf(name, sizeof(name), "  backward input");
    const double bs = time_ms(
        [&] { k::serial::conv2d_backward_input(d_out, W, in_c, ksz, din_s); }, reps);
    const double bp =
        time_ms([&] { k::conv2d_backward_input(d_out, W, in_c, ksz, din_p); }, reps);
    row(name, bs, bp, din_s == din_p);

    std::vector<double> dW_s(W.size()), db_s(b.size()), dW_p(W.size()), db_p(b.size());
    std::snprintf(name, sizeof(name), "  backward params");
    const double ps = time_ms(
        [&] {
            std::fill(dW_s.begin(), dW_s.end(), 0.0);
            std::fill(db_s.begin(), db_s.end(), 0.0);
            k::serial::conv2d_backward_params(d_out, in, ksz, dW_s, db_s);
        },
        reps);
    const double pp = time_ms(
        [&] {
            std::fill(dW_p.begin(), dW_p.end(), 0.0);
            std::fill(db_p.begin(), db_p.end(), 0.0);
            k::conv2d_backward_params(d_out, in, ksz, dW_p, db_p);
        },
        reps);
    row(name, ps, pp, dW_s == dW_p && db_s == db_p);
}

void bench_pool_upsample(int c, int size, int reps, std::mt19937_64& rng) {
    const Tensor in = random_tensor(c, size, size, rng);
    Tensor out_s(c, size / 2, size / 2), out_p(c, size / 2, size / 2);
    std::vector<int> idx_s, idx_p;

    char name[64];
    std::snprintf(name, sizeof(name), "maxpool2 %dc %dx%d", c, size, size);
    const double ts = time_ms([&] { k::serial::maxpool2_forward(in, out_s, idx_s); }, reps);
    const double tp = time_ms([&] { k::maxpool2_forward(in, out_p, idx_p); }, reps);
    row(name, ts, tp, out_s == out_p && idx_s == idx_p);

    Tensor up_s(c, size, size), up_p(c, size, size);
    std::snprintf(name, sizeof(name), "upsample2 %dc %dx%d", c, size / 2, size / 2);
    const double us = time_ms([&] { k::serial::upsample2_forward(out_s, up_s); }, reps);
    const double up = time_ms([&] { k::upsample2_forward(out_p, up_p); }, reps);
    row(name, us, up, up_s == up_p);
}

}  // namespace

int main() {
    std::mt19937_64 rng(17);
    std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial/ms", "openmp/ms", "speedup");

    bench_conv(16, 16, 46, 5, 20, rng);
    bench_conv(16, 16, 46, 7, 10, rng);
    bench_conv(32, 32, 92, 3, 5, rng);
    bench_pool_upsample(32, 92, 50, rng);

    if (failures > 0) {
        std::printf("\n%d kernel(s) differ between serial and parallel\n", failures);
        return 1;
    }
    std::printf("\nall kernels bitwise equal across implementations\n");
    return 0;
}
