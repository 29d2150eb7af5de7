#pragma once

#include <optional>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

enum class SamplingMode { Hemisphere, FullSphere };

const char* to_string(SamplingMode m);
SamplingMode parse_sampling_mode(const std::string& s);

struct SamplingConfig {
    SamplingMode mode = SamplingMode::FullSphere;
    int parallels = 8;       // alpha
    int candidates = 800;    // N
    double working_distance = 0.4;
    Vec3 up = Vec3::UnitZ();
};

struct CandidateView {
    int index = 0;
    Posed pose;
    double radius = 0;
    double polar = 0;    // from the up axis, radians
    double azimuth = 0;  // [0, 2 pi)
    int partition = 0;
    std::optional<double> score;
};

/// Sampling radius: working distance plus half the box diagonal.
double sampling_radius(const Box3& bbox, double working_distance);

/// Polar angles of the parallels. Hemisphere: evenly spaced over
/// [15 deg, 85 deg] including both ends (one parallel sits at the middle).
/// Full sphere: the alpha interior points of an even split of [0, pi].
std::vector<double> parallel_polar_angles(SamplingMode mode, int parallels);

/// Splits `total` across weights proportionally with largest-remainder
/// rounding (ties go to the lower index).
std::vector<int> proportional_counts(const std::vector<double>& weights, int total);

/// Candidate views on the sampling sphere, all looking at `center`.
std::vector<CandidateView> sample_candidates(const SamplingConfig& config, const Vec3& center, double radius);

/// View on the sphere of `radius` around `center` at the given angles.
CandidateView make_view(const Vec3& center, double radius, double polar, double azimuth, const Vec3& up);

/// Longitude sector floor(azimuth / (2 pi / beta)).
int partition_of(double azimuth, int beta);
void assign_partitions(std::vector<CandidateView>& views, int beta);

}  // namespace nbv
