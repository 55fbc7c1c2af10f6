"""Perfect quadratic forms over real quadratic fields.

Exact construction of an initial perfect form over Q(sqrt d) and Voronoi's
algorithm for the GL_2(O)-classes of perfect binary forms.
"""

from .formspace import FormOverF, RationalGram, evaluate, evaluation_vector, restriction_of_scalars
from .perfection import PerfectionReport, perfection_report
from .qfield import FieldDescriptor, FieldElement, field, rational_field
from .seed import SeedData, initial_alpha, initial_perfect_form, seed_trace_form
from .shortvec import MinimalData, brute_force_minimal_vectors, minimal_vectors
from .voronoi import EnumerationResult, PerfectClass, are_equivalent, enumerate_classes, neighbor

__version__ = "0.1.0"
