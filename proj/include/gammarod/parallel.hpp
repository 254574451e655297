#pragma once

namespace gammarod {

/// Serial kernels are the reference implementation; parallel kernels must
/// reproduce them bit-for-bit.
enum class Exec { Serial, Parallel };

void set_num_threads(int n);
int num_threads();

}  // namespace gammarod
