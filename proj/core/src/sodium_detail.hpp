#pragma once

namespace hybridsl::detail {

void ensure_sodium();

}  // namespace hybridsl::detail
