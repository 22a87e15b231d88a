// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

namespace rismle {

inline constexpr const char* version_string = "0.1.0";

} // namespace rismle
