#include "bootperc/rule.hpp"

#include <algorithm>
#include <cstdlib>

#include "bootperc/error.hpp"

namespace bootperc {

NeighbourhoodRule::NeighbourhoodRule(std::vector<Offset> offsets, int threshold, std::string name)
    : offsets_(std::move(offsets)), threshold_(threshold), name_(std::move(name)) {
    std::sort(offsets_.begin(), offsets_.end());
    if (offsets_.empty()) fail(ErrorKind::invalid_parameter, "rule has no offsets");
    if (std::adjacent_find(offsets_.begin(), offsets_.end()) != offsets_.end())
        fail(ErrorKind::invalid_parameter, "rule offsets contain duplicates");
    if (std::find(offsets_.begin(), offsets_.end(), Offset{0, 0}) != offsets_.end())
        fail(ErrorKind::invalid_parameter, "rule offsets contain the origin");
    if (threshold_ < 1 || threshold_ > static_cast<int>(offsets_.size()))
        fail(ErrorKind::invalid_parameter, "threshold must lie in [1, |offsets|]");

    const int b = threshold_ - 1;
    if (b >= 2 && static_cast<int>(offsets_.size()) == 2 * b + 2) {
        std::vector<Offset> expected{{0, -1}, {0, 1}};
        for (int d = 1; d <= b; ++d) {
            expected.push_back({-d, 0});
            expected.push_back({d, 0});
        }
        std::sort(expected.begin(), expected.end());
        if (expected == offsets_) anisotropy_ = b;
    }
}

int NeighbourhoodRule::horizontal_reach() const {
    int reach = 0;
    for (const auto& o : offsets_) reach = std::max(reach, std::abs(o.dx));
    return reach;
}

int NeighbourhoodRule::vertical_reach() const {
    int reach = 0;
    for (const auto& o : offsets_) reach = std::max(reach, std::abs(o.dy));
    return reach;
}

NeighbourhoodRule two_neighbour_rule() {
    return NeighbourhoodRule({{-1, 0}, {0, -1}, {0, 1}, {1, 0}}, 2, "two-neighbour");
}

NeighbourhoodRule duarte_rule() {
    return NeighbourhoodRule({{-1, 0}, {0, -1}, {0, 1}}, 2, "duarte");
}

NeighbourhoodRule anisotropic_rule(int b) {
    if (b < 2) fail(ErrorKind::invalid_parameter, "anisotropic rule needs b >= 2");
    std::vector<Offset> offsets{{0, -1}, {0, 1}};
    for (int d = 1; d <= b; ++d) {
        offsets.push_back({-d, 0});
        offsets.push_back({d, 0});
    }
    return NeighbourhoodRule(std::move(offsets), b + 1, "anisotropic:" + std::to_string(b));
}

NeighbourhoodRule make_rule(const RuleSpec& spec) {
    switch (spec.family) {
        case RuleFamily::two_neighbour: return two_neighbour_rule();
        case RuleFamily::anisotropic: return anisotropic_rule(spec.b);
        case RuleFamily::duarte: return duarte_rule();
        case RuleFamily::custom: return NeighbourhoodRule(spec.offsets, spec.threshold, "custom");
    }
    fail(ErrorKind::invalid_parameter, "unknown rule family");
}

NeighbourhoodRule parse_rule(const std::string& text) {
    if (text == "two-neighbour" || text == "two_neighbour") return two_neighbour_rule();
    if (text == "duarte") return duarte_rule();
    if (text == "anisotropic") return anisotropic_rule(2);
    const std::string prefix = "anisotropic:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string tail = text.substr(prefix.size());
        char* end = nullptr;
        const long b = std::strtol(tail.c_str(), &end, 10);
        if (tail.empty() || *end != '\0') fail(ErrorKind::invalid_parameter, "bad rule: " + text);
        return anisotropic_rule(static_cast<int>(b));
    }
    fail(ErrorKind::invalid_parameter, "unknown rule: " + text);
}

}  // namespace bootperc
