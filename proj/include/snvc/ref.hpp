#pragma once

#include "snvc/box_geom.hpp"
#include "snvc/confidence_maps.hpp"
#include "snvc/feature_sampling.hpp"
#include "snvc/voxel_grid.hpp"

/// Serial reference implementations of the data-parallel kernels.
///
/// These are deliberately plain nested loops with their own arithmetic,
/// kept independent of the OpenMP kernels so tests can cross-check results
/// and the bench tool can measure the parallel speedup against a baseline.
namespace snvc::ref {

VernierGrid build_grid(const Box3D& proposal, const GridSpec& spec);

OccupancyLabels label_occupancy(const VernierGrid& grid,
                                const PointCloud& cloud_cam, const Box3D& gt,
                                double margin = 0.0);

ColoredGrid aggregate_stereo(const VernierGrid& grid, const FeatureMap& left,
                             const FeatureMap& right, const CameraRig& rig);

ColoredGrid aggregate_volume(const VernierGrid& grid,
                             const FeatureVolume& volume);

PartConfidenceMaps encode(const VernierGrid& grid, const Box3D& gt,
                          double sigma_cells);

}  // namespace snvc::ref
