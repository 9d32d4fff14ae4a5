"""
helper.py - Long help text for the quadricgon command line.

`HELP_TEXT` is shown as the epilog of `quadricgon --help`; per-command flags are
documented by argparse itself.
"""

HELP_TEXT = """
quadricgon - exact interpolation checks for nodal curves on P^1 x P^1
======================================================================

Commands:
  hilbert        h^0 / h^1 of I_W(a,b) for W = fat and reduced points
  member         a random form of bidegree (a,b) through W
  position       incidence maxima on curves of type (1,0) ... (1,2)
  peel-e4        peeling certificate for a general set E at (u,v)
  peel-g4        peeling certificate for S (general) plus B at (u,u), u = 3*alpha+beta
  check-cert     replay a certificate file given with --input
  curve          nodal curve of type (a,b) with x general nodes
  tangent-curve  same, tangent to two ruling lines
  bounds         d3 / d4 bounds for (a, m, x) with provenance
  sample-d4      sample the h^1 vanishing behind the d4 lower bound
  genus-cover    write g = (a-1)^2 - x with 0 <= x <= 2a-4
  asymptotics    ratio intervals for a = 204 .. a-max
  sweep          run --target over --param name=lo:hi or name=v1,v2,... grids

Field:
  --prime P selects F_P; --prime rational selects exact rationals.
  Without --prime the environment variable QUADRICGON_PRIME is used, then 65537.

Exit status:
  0  every check passed
  1  a mathematical check failed or disagreed (the report is still written)
  2  usage error

Examples:
  quadricgon bounds --a 204 --m 0 --x 0
  quadricgon genus-cover --g 40805
  quadricgon hilbert --a 4 --b 4 --fat 3 --seed 7
  quadricgon sweep --target bounds --param a=204:210 --param x=0,1 --output runs/
"""
