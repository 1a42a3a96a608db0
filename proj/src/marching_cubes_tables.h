#pragma once

namespace sfusion::mc {

extern const int kEdgeCorners[12][2];
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

}  // namespace sfusion::mc
