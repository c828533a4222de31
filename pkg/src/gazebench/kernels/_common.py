# Cell state codes shared with gazebench.voxel.CellState.
UNKNOWN = 0
FREE = 1
OCCUPIED = 2

# Slack on the cone boundary tests. Keeps membership stable under
# floating-point noise in the camera pose (e.g. yaw vs yaw + 2*pi).
ANG_EPS = 1e-9
RANGE_EPS = 1e-9
POS_EPS = 1e-9
