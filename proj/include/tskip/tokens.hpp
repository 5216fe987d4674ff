#pragma once

namespace tskip {

// Reserved vocabulary ids, fixed across every model and checkpoint.
constexpr int kPadId = 0;
constexpr int kUnkId = 1;
constexpr int kBosId = 2;
constexpr int kEosId = 3;
constexpr int kNumReserved = 4;

inline const char* kPadToken = "<pad>";
inline const char* kUnkToken = "<unk>";
inline const char* kBosToken = "<bos>";
inline const char* kEosToken = "<eos>";

}  // namespace tskip
