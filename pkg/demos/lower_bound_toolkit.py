"""The product lower bound on coin-flipping bias, end to end.

Run:  python demos/lower_bound_toolkit.py
"""

import numpy as np

from qcoinflip.lowerbound import (
    cheat_product_check,
    dual_bound_sequence,
    extract_dual_chain,
    kparty_product_check,
    merge_cheaters,
    multiparty_bias_bound,
    optimal_cheat,
)
from qcoinflip.protocols import (
    alice_announces,
    announce_kparty,
    penalty_protocol,
    penalty_protocol_compact4,
    validate_protocol,
)

print("=== a protocol is a tuple of round unitaries plus outcome projectors ===")
for protocol in (alice_announces(), penalty_protocol_compact4(), penalty_protocol(16.0)):
    report = validate_protocol(protocol)
    print(f"  {protocol.name:<18} valid={report.valid}  p0={report.p0:.3f} p1={report.p1:.3f}"
          f"  dims A/M/B = {protocol.layout_a.dim}/{protocol.layout_m.dim}/{protocol.layout_b.dim}")

print("\n=== optimal cheating is a semidefinite program over the honest view ===")
p = alice_announces()
print("alice-announces: the announcer forces any outcome, the listener nothing:")
print(f"  opener forces 1:   {optimal_cheat(p, 'alice', 1).probability:.6f}")
print(f"  listener forces 1: {optimal_cheat(p, 'bob', 1).probability:.6f}")

print("\npenalty game at v = 16 (forcing, no penalty in the objective):")
pv = penalty_protocol(16.0)
check = cheat_product_check(pv)
print(f"  opener forces 1:    {check.p_alice_forces:.6f}")
print(f"  responder forces 1: {check.p_bob_forces:.6f}   (= the measurement-attack value)")
print(f"  product {check.product:.6f} >= honest p1 = {check.p_honest:.3f}:"
      f" the product bound in action")

print("\n=== the interpolating certificate sequence ===")
cert_a, _ = extract_dual_chain(pv, "bob", 1)
cert_b, _ = extract_dual_chain(pv, "alice", 1)
values = dual_bound_sequence(pv, cert_a, cert_b, target=1)
print(f"penalty game at v = 16: chain values ({cert_a.claimed_value:.5f}, {cert_b.claimed_value:.5f})")
print(f"F_j = {[round(v, 5) for v in values]}")
print("F_0 = 3/4 * 3/4 bounds the cheat product, F_N is the honest outcome")
print("probability 1/2; the sequence never increases, so cheat products can")
print("never beat honest odds: p_alice * p_bob >= p_1.")

print("\n=== k parties: merge the cheaters, reuse the two-party machinery ===")
kp = announce_kparty(3)
check3 = kparty_product_check(kp)
print("3-party announce protocol, per-party forcing probabilities:")
for (party, bit), prob in sorted(check3.probabilities.items()):
    print(f"  party {party} forced to {bit}: {prob:.4f}")
print(f"products {tuple(round(x, 4) for x in check3.products)} >= 1/2: the bound holds")

print("\n=== what that means for the best possible bias ===")
for k in (2, 4, 16, 64):
    bound = multiparty_bias_bound(k)
    print(f"  k = {k:>3}: some party forced with prob >= {bound.q_min:.5f}"
          f" -> bias >= {bound.bias:.5f}")
print("1 - q_min shrinks like ln(2)/k: no protocol beats bias 1/2 - O(g/k).")
