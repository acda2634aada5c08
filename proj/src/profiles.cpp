#include "migsched/profiles.hpp"

#include "migsched/error.hpp"

namespace migsched {

const std::array<MigProfile, kProfileCount>& profiles() {
    static const std::array<MigProfile, kProfileCount> table = {{
        {"7g.40gb", 7, 8, {0}, 8},
        {"4g.20gb", 4, 4, {0}, 4},
        {"3g.20gb", 3, 4, {0, 4}, 4},
        {"2g.10gb", 2, 2, {0, 2, 4}, 2},
        {"1g.10gb", 1, 2, {0, 2, 4, 6}, 2},
        {"1g.5gb", 1, 1, {0, 1, 2, 3, 4, 5, 6}, 1},
    }};
    return table;
}

const MigProfile& profile(ProfileId id) {
    return profiles()[static_cast<std::size_t>(id)];
}

std::optional<ProfileId> find_profile(std::string_view name) {
    const auto& table = profiles();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].name == name) return static_cast<ProfileId>(i);
    }
    return std::nullopt;
}

bool valid(const MigProfile& p, Placement pl) {
    if (pl.size != p.size) return false;
    for (int st : p.start_indexes) {
        if (st == pl.start) return true;
    }
    return false;
}

bool valid(ProfileId id, Placement pl) { return valid(profile(id), pl); }

namespace {

std::uint8_t slice_mask(int start, int count) {
    return static_cast<std::uint8_t>(((1u << count) - 1u) << start);
}

}  // namespace

SliceFootprint slice_footprint(const MigProfile& p, Placement pl) {
    if (!valid(p, pl)) {
        throw Error("InvalidPlacement",
                    "placement (" + std::to_string(pl.start) + "," + std::to_string(pl.size) +
                        ") is not valid for profile " + std::string(p.name));
    }
    return SliceFootprint{slice_mask(pl.start, p.compute_slices),
                          slice_mask(pl.start, p.memory_slices)};
}

SliceFootprint slice_footprint(ProfileId id, Placement pl) {
    return slice_footprint(profile(id), pl);
}

}  // namespace migsched
