#pragma once

#include <complex>
#include <span>

namespace pecs {

using cdouble = std::complex<double>;

// Unitary 1D DFT, in place. Both directions carry a 1/sqrt(n) factor, so the
// inverse transform is also the adjoint. Forward uses the negative-exponent
// kernel; index 0 is the DC bin (no fftshift).
//
// Power-of-two lengths run an iterative radix-2 kernel; everything else goes
// through Bluestein's chirp-z embedding, so any n >= 1 is supported in
// O(n log n).
void unitary_dft(std::span<cdouble> data, bool inverse);

}  // namespace pecs
