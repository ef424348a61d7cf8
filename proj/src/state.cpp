#include "nlpf/state.hpp"

namespace nlpf {

SystemState make_state(const DomainGrid& grid) {
    SystemState s;
    s.theta = make_field(grid, FieldTag::Theta);
    s.chi = make_field(grid, FieldTag::Chi);
    s.chi_t = make_field(grid, FieldTag::Other);
    s.time = 0.0;
    return s;
}

void validate_state(const SystemState& state) {
    validate_field(state.theta);
    validate_field(state.chi);
    validate_field(state.chi_t);
}

}  // namespace nlpf
