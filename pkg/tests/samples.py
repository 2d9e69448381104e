"""Small hand-written derivations shared by several test modules."""

GENERALISE = """\
RForall @R0 [z] |- forall x. P(x) => forall y. P(y)
  LForall @L0 [z] |- forall x. P(x) => P(z)
    InitAtom @L0,R0 |- P(z), forall x. P(x) => P(z)
"""

# TABLE:dense, one existential eigenvariable
DENSE = """\
Geo @L0 [dense; x:=a, y:=b; eig w] |- R(a, b) => exists v. R(a, v) & R(v, b)
  RExists @R0 [w] |- R(a, w), R(w, b), R(a, b) => exists v. R(a, v) & R(v, b)
    RAnd @R0 |- R(a, w), R(w, b), R(a, b) => R(a, w) & R(w, b), exists v. R(a, v) & R(v, b)
      InitAtom @L0,R0 |- R(a, w), R(w, b), R(a, b) => R(a, w), exists v. R(a, v) & R(v, b)
      InitAtom @L1,R0 |- R(a, w), R(w, b), R(a, b) => R(w, b), exists v. R(a, v) & R(v, b)
"""

# G_eq, both identity rules: s = t => t = s
SYMMETRY = """\
Geo @- [Ref; x:=s] |- s = t => t = s
  Geo @L1,L0 [Repl; x:=s, y:=t; pos 0] |- s = s, s = t => t = s
    InitAtom @L0,R0 |- t = s, s = s, s = t => t = s
"""
