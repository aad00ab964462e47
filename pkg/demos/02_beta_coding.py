"""Cantor pairing and the beta function.

Finite sequences of naturals are coded by a single number w so that
beta(w, i) returns the i-th entry.  This is what lets a first-order formula
talk about a whole loop history.
"""
from whilepa import coding

# pairing is a bijection N x N -> N
print([[coding.pair(x, y) for y in range(4)] for x in range(4)])
z = coding.pair(3, 4)
print(z, "->", coding.unpair(z), coding.left(z), coding.right(z))

# vectors nest pairs to the right; a one-element vector is the value itself
v = coding.pack_vec([3, 1, 4])
print("pack [3,1,4] =", v, "->", coding.unpack_vec(v, 3))

# beta(w, i) = rem(L(w), R(w) * (i + 1) + 1)
a = [4, 7, 1]
w = coding.encode_seq(a)
print("\ncode of", a, "=", w, " (c, s) =", coding.unpair(w))
print("entries:", [coding.beta(w, i) for i in range(3)])

# the textbook choice s = max(n, max a)! works too, with much larger codes
w2 = coding.encode_seq(a, method="factorial")
print("factorial code has", len(str(w2)), "digits; lcm code has", len(str(w)))

# extension: append an entry without disturbing the earlier ones
w3 = coding.extend_seq(w, 3, 9)
print("extended:", coding.decode_seq(w3, 4))

# the moduli R(w)(i+1)+1 are pairwise coprime, so the CRT solution exists
c, s = coding.unpair(w)
print("moduli:", [s * (i + 1) + 1 for i in range(3)])
