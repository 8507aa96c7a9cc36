#include "phimin/numerics/ode.hpp"

namespace phimin::numerics {

template class Dopri5<2>;
template class Dopri5<3>;
template class Radau5<3>;

}  // namespace phimin::numerics
