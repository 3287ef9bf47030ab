// Times the OpenMP pixel kernels against their serial reference
// implementations on representative frame sizes.

#include <chrono>
#include <cstdio>
#include <random>

#include "guireplay/imaging.hpp"

using namespace guireplay;
using Clock = std::chrono::steady_clock;

namespace {

PixelImage random_image(int w, int h, std::uint64_t seed) {
    PixelImage img(w, h);
    std::mt19937_64 rng(seed);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng());
    return img;
}

template <class F>
double time_ms(F&& fn, int reps) {
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

}  // namespace

int main() {
    const int reps = 5;
    PixelImage frame = random_image(1080, 2340, 7);
    GrayImage gray = imaging::serial::to_grayscale(frame);
    PixelImage clip = random_image(120, 120, 11);
    GrayImage clip_gray = imaging::serial::to_grayscale(clip);
    GrayImage small_target = imaging::serial::to_grayscale(random_image(480, 800, 13));

    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    row("to_grayscale",
        time_ms([&] { imaging::serial::to_grayscale(frame); }, reps),
        time_ms([&] { imaging::to_grayscale(frame); }, reps));

    row("gradient_binarize",
        time_ms([&] { imaging::serial::gradient_binarize(gray, 8); }, reps),
        time_ms([&] { imaging::gradient_binarize(gray, 8); }, reps));

    row("downscale_luma",
        time_ms([&] { imaging::serial::downscale_luma(gray, 64, 128); }, reps),
        time_ms([&] { imaging::downscale_luma(gray, 64, 128); }, reps));

    row("resize_nearest",
        time_ms([&] { imaging::serial::resize_nearest(frame, 64, 64); }, reps),
        time_ms([&] { imaging::resize_nearest(frame, 64, 64); }, reps));

    row("ncc_score_map",
        time_ms([&] { imaging::serial::ncc_score_map(small_target, clip_gray); }, 1),
        time_ms([&] { imaging::ncc_score_map(small_target, clip_gray); }, 1));

    return 0;
}
