// Binary PT-MPO container, so CLI runs can cache and reuse PT-MPOs.
//
// Layout (all integers little-endian):
//   magic   "PTMPO1\n"            7 bytes
//   flags   u8                     bit 0: closure section present
//   n       u64                    number of steps
//   D       u64                    system Hilbert dimension
//   bonds   u64[n+1]               bond dimensions d_0..d_n
//   payload per step l = 1..n: complex<double> (re, im) pairs in index
//           order (d_l, d_{l-1}, alpha_out, alpha_in), d_l slowest
//   closures (when flagged): for l = 0..n, bond(l) complex<double> pairs
//
// Complex doubles are IEEE-754 binary64 little-endian.

#pragma once

#include <string>

#include "ptc/process_tensor.hpp"

namespace ptc {

void save_ptmpo(const std::string& path, const ProcessTensor& pt);
ProcessTensor load_ptmpo(const std::string& path);

}  // namespace ptc
