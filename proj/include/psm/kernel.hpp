#pragma once

#include "psm/dense_matrix.hpp"
#include "psm/geometry.hpp"

namespace psm {

// 3D Laplace kernel 1/|x-y|. Coincident points are a hard error: the method
// keeps sources and targets separated, so overlap signals misuse.
double laplace_kernel(const Point3& x, const Point3& y);

// Entry (i,j) = laplace_kernel(X[i], Y[j]). Assembly may be split across
// threads by row blocks; entries are pure so the result is identical.
DenseMatrix kernel_matrix(const PointSet& X, const PointSet& Y, int threads = 1);

}  // namespace psm
