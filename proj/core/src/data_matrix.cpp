#include "wds/data_matrix.hpp"

namespace wds {

bool all_finite(const Eigen::MatrixXd& m) {
    return m.allFinite();
}

} // namespace wds
