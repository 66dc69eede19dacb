#pragma once

#include "hiflab/field.hpp"

namespace hiflab {

// Nodal first derivatives: central differences at interior nodes,
// second-order one-sided stencils on Γ. Total functions.
ScalarField dx_quotient(const ScalarField& u);
ScalarField dy_quotient(const ScalarField& u);
GradientField gradient(const ScalarField& u);

// div(a∇u) in flux form: arithmetic face averages for the diagonal part,
// centered cross stencil for a12. Interior nodes only; Γ values are 0.
ScalarField divergence_a_grad(const MatrixField& a, const ScalarField& u);
ScalarField divergence_a_grad(const ScalarField& a, const ScalarField& u);

// 5-point Laplacian, interior only, Γ values 0.
ScalarField laplacian(const ScalarField& u);

}  // namespace hiflab
