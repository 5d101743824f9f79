#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace bootperc {

struct Offset {
    int dx = 0;
    int dy = 0;
    auto operator<=>(const Offset&) const = default;
};

enum class RuleFamily { two_neighbour, anisotropic, duarte, custom };

struct RuleSpec {
    RuleFamily family = RuleFamily::anisotropic;
    int b = 2;                     // anisotropic (1,b) only
    std::vector<Offset> offsets;   // custom only
    int threshold = 0;             // custom only
};

// Update family: a site becomes infected once at least `threshold` of the
// sites v + offset are infected.
class NeighbourhoodRule {
public:
    NeighbourhoodRule(std::vector<Offset> offsets, int threshold, std::string name = {});

    const std::vector<Offset>& offsets() const { return offsets_; }
    int threshold() const { return threshold_; }
    const std::string& name() const { return name_; }

    int horizontal_reach() const;
    int vertical_reach() const;

    // b of the (1,b) family, when the rule is one.
    std::optional<int> anisotropy() const { return anisotropy_; }

    bool operator==(const NeighbourhoodRule& other) const {
        return offsets_ == other.offsets_ && threshold_ == other.threshold_;
    }

private:
    std::vector<Offset> offsets_;
    int threshold_;
    std::string name_;
    std::optional<int> anisotropy_;
};

NeighbourhoodRule make_rule(const RuleSpec& spec);
NeighbourhoodRule two_neighbour_rule();
NeighbourhoodRule anisotropic_rule(int b = 2);
NeighbourhoodRule duarte_rule();

// Accepts "anisotropic", "anisotropic:<b>", "two-neighbour", "duarte".
NeighbourhoodRule parse_rule(const std::string& text);

}  // namespace bootperc
