#pragma once

namespace kdvlim {

// Complete elliptic integrals of modulus s (not the parameter s^2),
// by arithmetic-geometric-mean iteration.  K requires 0 <= s < 1,
// E requires 0 <= s <= 1.
double elliptic_K(double s);
double elliptic_E(double s);

// Jacobi elliptic functions of modulus s on the real line, 0 <= s < 1,
// via the descending Landen transformation.  dn falls back to sech when
// 1 - s < 1e-12.
double jacobi_sn(double z, double s);
double jacobi_dn(double z, double s);

// theta(z; tau) = sum_n exp(pi i n^2 tau + 2 pi i n z) for purely
// imaginary tau = i*imtau, imtau > 0.  For imtau < 0.05 the modular
// transformation tau -> -1/tau turns the sum into a rapidly convergent
// Gaussian comb.
double theta3(double z, double imtau);
// First and second z-derivatives of log theta3, same conventions.
double theta3_dlog(double z, double imtau);
double theta3_ddlog(double z, double imtau);

// Airy function on the real line, and its derivative.
double airy_Ai(double s);
double airy_Aip(double s);

// Hermite normalization constant h_j = 2^{j/2} / (pi^{1/4} sqrt(j!)),
// evaluated in log space.  j must lie in [0, 170].
double hermite_norm(int j);

}  // namespace kdvlim
