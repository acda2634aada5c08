#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace migsched {

// An A100 exposes 7 compute slices and 8 memory slices.
inline constexpr int kGpuComputeSlices = 7;
inline constexpr int kGpuMemorySlices = 8;

enum class ProfileId : std::uint8_t {
    p7g40gb = 0,
    p4g20gb = 1,
    p3g20gb = 2,
    p2g10gb = 3,
    p1g10gb = 4,
    p1g5gb = 5,
};

inline constexpr int kProfileCount = 6;

// One row of the A100 40GB instance-profile table.
struct MigProfile {
    std::string_view name;
    int compute_slices = 0;
    int memory_slices = 0;
    std::vector<int> start_indexes;  // legal starting memory-slice indexes
    int size = 0;                    // memory slices spanned
};

// A concrete (start, size) slot on the memory-slice axis of one GPU.
struct Placement {
    int start = 0;
    int size = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

// Slice occupancy as bitmasks, bit i = slice i.
struct SliceFootprint {
    std::uint8_t compute = 0;
    std::uint8_t memory = 0;

    bool intersects(const SliceFootprint& other) const {
        return (compute & other.compute) != 0 || (memory & other.memory) != 0;
    }
};

const std::array<MigProfile, kProfileCount>& profiles();
const MigProfile& profile(ProfileId id);
std::optional<ProfileId> find_profile(std::string_view name);

// True iff placement.size matches the profile and placement.start is one of
// the profile's legal start indexes.
bool valid(const MigProfile& p, Placement pl);
bool valid(ProfileId id, Placement pl);

// Compute slices {start .. start+cs-1}, memory slices {start .. start+ms-1}.
// Throws Error("InvalidPlacement") when !valid(p, pl).
SliceFootprint slice_footprint(const MigProfile& p, Placement pl);
SliceFootprint slice_footprint(ProfileId id, Placement pl);

}  // namespace migsched
