"""roilens: interactive geospatial exploration with implicit mouse feedback.

Captures throttled mouse traces, discovers regions of interest as
cross-segment cluster-hull intersections, and highlights a few relevant,
diverse POIs per region while keeping a transparent facet feedback vector.
"""

from .capture import CaptureConfig, OrderingError, RecorderState, Segment, Strategy, record, segment_stream
from .dataset import Dataset, ingest_csv, ingest_file, ingest_geojson
from .discover import (Cluster, ConvexPolygon, DegenerateClusterError, ROI,
                       akl_toussaint_filter, convex_hull, discover_rois,
                       expand_polygon, intersect_polygons, st_dbscan)
from .feedback import (FacetSchema, FeedbackVector, PeculiarityMode, budget,
                       confidence, normalized, peculiarity, update)
from .geo import (DegenerateViewportError, GeoPoint, POI, RoilensError,
                  ScreenPoint, Viewport, project_to_geo, project_to_screen)
from .highlight import (FuzzyResult, FuzzyRoi, GreedySelection, fuzzy_highlight,
                        greedy_highlight, pairwise_diversity, relevance_scores)
from .session import PipelineConfig, Session, replay_session_log
from .spatial_index import MatchedSet, Quadtree, build_index, facet_vector, match_points

__version__ = "0.1.0"
