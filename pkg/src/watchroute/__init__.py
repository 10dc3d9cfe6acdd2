"""watchroute: visibility-based route optimization in polygonal domains.

Solvers for quota watchman routes (shortest route seeing a prescribed area),
budgeted watchman routes (maximum area under a length budget), exact variants
on line arrangements, a budgeted approximation for polygons with holes, and
probability-measure variants for stochastic target search.
"""

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import (AllParallel, CandidateCapExceeded, CapExceeded,
                     DepthExceeded, InfeasibleQuota, InvalidEpsilon,
                     NonSimplePolygon, PointOutsideDomain, QuotaExceedsLines,
                     RegionOutsideDomain, SegmentLeavesDomain,
                     TourOutsideWindow, WatchrouteError)
from .geom import (PolygonWithHoles, Segment, SimplePolygon, Triangulation,
                   orientation, point_sees_point, polygon_area, segment_inside,
                   triangulate, triangulate_domain, triangulate_with_holes)
from .region import Region, clip_difference, clip_intersection, clip_union, union_all
from .visibility import (VisibilityRegion, marginal_visibility,
                         visibility_from_point, visibility_from_segment,
                         visibility_of_chain)
from .geodesic import (AngularOrder, GeodesicPath, RelConvexHull,
                       ShortestPathTree, angular_order, build_spt,
                       is_rc_extension, relative_convex_hull, shortest_path,
                       turn_allows)
from .discretize import (BucketSpec, CandidateSet, GridSpec, build_candidates,
                         choose_parameters_bwrp, choose_parameters_qwrp,
                         count_candidates, explicit_candidates, snap_tour)
from .tour import Tour
from .simple_dp import (BudgetParams, MarginalCache, QuotaParams,
                        interior_depot_wrap, solve_bwrp, solve_floating,
                        solve_qwrp_dual, solve_qwrp_fptas)
from .lines import (ArrangementGraph, LineArrangement, build_arrangement,
                    solve_all_quotas, solve_lines_bwrp, solve_lines_qwrp)
from .holes import (LineGraphG2, RewardOracle, VisibilityGraphG1, build_g1,
                    build_g2, recursive_greedy, snap_with_holes,
                    solve_bwrp_holes)
from .measure import (MeasureOracle, measure_of_region, solve_max_detection,
                      solve_min_time_detection)
from .instances import InstanceDoc, ResultDoc, verify_result
from .oracles import (bf_route_oracle, knapsack_max_value, knapsack_min_weight,
                      lines_bf_oracle, walks_bf_oracle)
from .gadgets import GadgetLayout, gadget_instance_doc, gen_gadget_qwrp, selected_detours
from .generators import (comb_polygon, l_shape, random_arrangement,
                         random_boundary_point, random_density,
                         random_points_inside, random_simple_polygon,
                         square_with_hole, zigzag_corridor)
from .render import render_svg

__version__ = "0.1.0"
