"""Built-in problem fixtures.

The two SAT operators ship as coefficient-table text in the same layout the
table reader accepts (multi-column, whitespace separated). SAT5 is a 15-clause
unique-solution instance given by its traceless Pauli decomposition; adding
the identity weight m/8 = 15/8 restores the projector-sum operator whose
ground energy is 0. SAT8 is kept verbatim as an 8-qubit diagonal operator
fixture; its clause list is not known, so no identity weight is added.
"""

from .pauli import Hamiltonian, parse_coefficient_table
from .problems import tfim_hamiltonian

TFIM_COUPLING = 2 ** -0.5  # critical point, J = h_x = 1/sqrt(2)

SAT5_IDENTITY_OFFSET = 15.0 / 8.0  # m/n = 3 with n = 5

SAT5_TABLE = """\
IIIIZ : -0.25       IIIZI : 0.125       IIIZZ : -0.125      IIZII : 0.375
IIZIZ : 0.125       IIZZI : -0.125      IIZZZ : 0.25        IZIII : -0.125
IZIIZ : 0.125       IZIZI : 0.5         IZIZZ : -0.375      IZZII : -0.125
IZZZI : 0.25        ZIIII : 0.25        ZIIIZ : -0.125      ZIIZI : -0.25
ZIZII : -0.125      ZIZIZ : 0.125       ZIZZI : -0.125      ZZIII : -0.25
ZZIIZ : 0.25        ZZIZI : -0.125      ZZZII : -0.125"""

SAT8_TABLE = """\
IIIIIIIZ : -0.14453125    IIIIIIZI : -0.28515625    IIIIIIZZ : 0.01953125
IIIIIZII : -0.62890625    IIIIIZIZ : 0.00390625     IIIIIZZI : 0.00390625
IIIIIZZZ : 0.01171875     IIIIZIII : -1.24609375    IIIIZIIZ : -0.01953125
IIIIZIZI : 0.02734375     IIIIZIZZ : 0.00390625     IIIIZZII : -0.05078125
IIIIZZIZ : 0.00390625     IIIIZZZI : 0.00390625     IIIIZZZZ : 0.02734375
IIIZIIII : -2.34765625    IIIZIIIZ : -0.01171875    IIIZIIZI : -0.01171875
IIIZIIZZ : 0.01171875     IIIZIZII : -0.04296875    IIIZIZIZ : -0.00390625
IIIZIZZI : 0.01171875     IIIZIZZZ : 0.01953125     IIIZZIII : 0.05859375
IIIZZIIZ : 0.00390625     IIIZZIZI : -0.02734375    IIIZZIZZ : 0.01171875
IIIZZZII : -0.04296875    IIIZZZIZ : 0.01171875     IIIZZZZI : -0.00390625
IIIZZZZZ : -0.01171875    IIZIIIII : -5.01953125    IIZIIIIZ : -0.01171875
IIZIIIZI : -0.04296875    IIZIIIZZ : -0.00390625    IIZIIZII : -0.07421875
IIZIIZIZ : 0.04296875     IIZIIZZI : -0.00390625    IIZIIZZZ : -0.01171875
IIZIZIII : -0.17578125    IIZIZIIZ : -0.02734375    IIZIZIZI : 0.00390625
IIZIZIZZ : -0.03515625    IIZIZZII : -0.04296875    IIZIZZIZ : -0.00390625
IIZIZZZI : 0.01171875     IIZIZZZZ : 0.01953125     IIZZIIII : -0.29296875
IIZZIIIZ : 0.02734375     IIZZIIZI : -0.01953125    IIZZIIZZ : -0.01171875
IIZZIZII : -0.01953125    IIZZIZIZ : 0.00390625     IIZZIZZI : 0.00390625
IIZZIZZZ : 0.05859375     IIZZZIII : 0.06640625     IIZZZIIZ : -0.00390625
IIZZZIZI : -0.01953125    IIZZZIZZ : 0.00390625     IIZZZZII : -0.03515625
IIZZZZIZ : 0.00390625     IIZZZZZI : -0.02734375    IIZZZZZZ : 0.01171875
IZIIIIII : -10.27734375   IZIIIIIZ : -0.03515625    IZIIIIZI : 0.01171875
IZIIIIZZ : 0.06640625     IZIIIZII : 0.02734375     IZIIIZIZ : 0.00390625
IZIIIZZI : 0.00390625     IZIIIZZZ : 0.01171875     IZIIZIII : -0.04296875
IZIIZIIZ : -0.00390625    IZIIZIZI : -0.01953125    IZIIZIZZ : -0.01171875
IZIIZZII : 0.07421875     IZIIZZIZ : 0.00390625     IZIIZZZI : -0.05859375
IZIIZZZZ : -0.00390625    IZIZIIII : -0.20703125    IZIZIIIZ : 0.00390625
IZIZIIZI : 0.00390625     IZIZIIZZ : 0.05859375     IZIZIZII : 0.08203125
IZIZIZIZ : -0.00390625    IZIZIZZI : 0.01171875     IZIZIZZZ : -0.01171875
IZIZZIII : 0.13671875     IZIZZIIZ : -0.01171875    IZIZZIZI : 0.01953125
IZIZZIZZ : -0.00390625    IZIZZZII : 0.05078125     IZIZZZIZ : 0.01171875
IZIZZZZI : -0.00390625    IZIZZZZZ : -0.01171875    IZZIIIII : 0.05859375
IZZIIIIZ : 0.00390625     IZZIIIZI : 0.03515625     IZZIIIZZ : -0.01953125
IZZIIZII : 0.05078125     IZZIIZIZ : -0.01953125    IZZIIZZI : -0.00390625
IZZIIZZZ : -0.04296875    IZZIZIII : 0.02734375     IZZIZIIZ : 0.01953125
IZZIZIZI : -0.01171875    IZZIZIZZ : 0.01171875     IZZIZZII : -0.01171875
IZZIZZIZ : -0.00390625    IZZIZZZI : 0.01171875     IZZIZZZZ : 0.01953125
IZZZIIII : -0.08984375    IZZZIIIZ : 0.01171875     IZZZIIZI : 0.02734375
IZZZIIZZ : -0.02734375    IZZZIZII : 0.01171875     IZZZIZIZ : 0.00390625
IZZZIZZI : 0.00390625     IZZZIZZZ : -0.00390625    IZZZZIII : 0.01953125
IZZZZIIZ : 0.01171875     IZZZZIZI : -0.00390625    IZZZZIZZ : -0.01171875
IZZZZZII : 0.08984375     IZZZZZIZ : 0.00390625     IZZZZZZI : -0.02734375
IZZZZZZZ : -0.01953125    ZIIIIIII : -21.35546875   ZIIIIIIZ : -0.01953125
ZIIIIIZI : -0.01953125    ZIIIIIZZ : 0.00390625     ZIIIIZII : -0.09765625
ZIIIIZIZ : -0.02734375    ZIIIIZZI : 0.05078125     ZIIIIZZZ : 0.02734375
ZIIIZIII : -0.16796875    ZIIIZIIZ : -0.00390625    ZIIIZIZI : -0.00390625
ZIIIZIZZ : 0.00390625     ZIIIZZII : -0.00390625    ZIIIZZIZ : -0.01171875
ZIIIZZZI : 0.00390625     ZIIIZZZZ : -0.00390625    ZIIZIIII : -0.20703125
ZIIZIIIZ : 0.00390625     ZIIZIIZI : -0.01171875    ZIIZIIZZ : -0.01953125
ZIIZIZII : -0.05859375    ZIIZIZIZ : -0.01953125    ZIIZIZZI : -0.01953125
ZIIZIZZZ : 0.01953125     ZIIZZIII : -0.09765625    ZIIZZIIZ : -0.02734375
ZIIZZIZI : -0.01171875    ZIIZZIZZ : -0.00390625    ZIIZZZII : -0.10546875
ZIIZZZIZ : 0.01171875     ZIIZZZZI : 0.04296875     ZIIZZZZZ : 0.00390625
ZIZIIIII : -0.72265625    ZIZIIIIZ : 0.00390625     ZIZIIIZI : 0.01953125
ZIZIIIZZ : -0.00390625    ZIZIIZII : -0.05859375    ZIZIIZIZ : 0.02734375
ZIZIIZZI : 0.02734375     ZIZIIZZZ : 0.01953125     ZIZIZIII : -0.05078125
ZIZIZIIZ : 0.00390625     ZIZIZIZI : 0.01953125     ZIZIZIZZ : -0.01953125
ZIZIZZII : -0.01171875    ZIZIZZIZ : -0.00390625    ZIZIZZZI : -0.00390625
ZIZIZZZZ : 0.00390625     ZIZZIIII : -0.01171875    ZIZZIIIZ : -0.03515625
ZIZZIIZI : -0.00390625    ZIZZIIZZ : 0.00390625     ZIZZIZII : -0.01953125
ZIZZIZIZ : -0.02734375    ZIZZIZZI : -0.01171875    ZIZZIZZZ : 0.04296875
ZIZZZIII : -0.07421875    ZIZZZIIZ : 0.01171875     ZIZZZIZI : 0.01171875
ZIZZZIZZ : 0.03515625     ZIZZZZII : -0.08203125    ZIZZZZIZ : -0.01171875
ZIZZZZZI : 0.03515625     ZIZZZZZZ : 0.01171875     ZZIIIIII : -1.73046875
ZZIIIIIZ : 0.04296875     ZZIIIIZI : 0.07421875     ZZIIIIZZ : 0.00390625
ZZIIIZII : 0.10546875     ZZIIIZIZ : -0.01171875    ZZIIIZZI : -0.02734375
ZZIIIZZZ : 0.04296875     ZZIIZIII : 0.26953125     ZZIIZIIZ : 0.02734375
ZZIIZIZI : 0.05859375     ZZIIZIZZ : 0.00390625     ZZIIZZII : 0.04296875
ZZIIZZIZ : 0.00390625     ZZIIZZZI : -0.01171875    ZZIIZZZZ : -0.01953125
ZZIZIIII : 0.48046875     ZZIZIIIZ : -0.02734375    ZZIZIIZI : -0.07421875
ZZIZIIZZ : -0.01953125    ZZIZIZII : -0.01171875    ZZIZIZIZ : -0.00390625
ZZIZIZZI : 0.02734375     ZZIZIZZZ : 0.00390625     ZZIZZIII : -0.16015625
ZZIZZIIZ : -0.02734375    ZZIZZIZI : 0.01953125     ZZIZZIZZ : -0.00390625
ZZIZZZII : 0.03515625     ZZIZZZIZ : 0.02734375     ZZIZZZZI : -0.03515625
ZZIZZZZZ : 0.01953125     ZZZIIIII : 1.27734375     ZZZIIIIZ : 0.03515625
ZZZIIIZI : 0.01953125     ZZZIIIZZ : -0.00390625    ZZZIIZII : 0.05078125
ZZZIIZIZ : -0.01953125    ZZZIIZZI : 0.01171875     ZZZIIZZZ : 0.00390625
ZZZIZIII : 0.13671875     ZZZIZIIZ : 0.00390625     ZZZIZIZI : -0.01171875
ZZZIZIZZ : -0.01953125    ZZZIZZII : 0.00390625     ZZZIZZIZ : 0.01171875
ZZZIZZZI : -0.01953125    ZZZIZZZZ : 0.01953125     ZZZZIIII : 0.11328125
ZZZZIIIZ : -0.03515625    ZZZZIIZI : -0.03515625    ZZZZIIZZ : 0.00390625
ZZZZIZII : -0.00390625    ZZZZIZIZ : -0.01171875    ZZZZIZZI : -0.02734375
ZZZZIZZZ : -0.00390625    ZZZZZIII : -0.13671875    ZZZZZIIZ : -0.01953125
ZZZZZIZI : 0.01171875     ZZZZZIZZ : -0.02734375    ZZZZZZII : 0.02734375
ZZZZZZIZ : 0.00390625     ZZZZZZZI : 0.01953125     ZZZZZZZZ : -0.00390625"""


def sat5_traceless() -> Hamiltonian:
    """The 5-qubit SAT operator without its identity weight (min eig -15/8)."""
    return parse_coefficient_table(SAT5_TABLE)


def sat5_hamiltonian() -> Hamiltonian:
    """Full 5-qubit 3-SAT Hamiltonian (ground energy 0, unique solution)."""
    return sat5_traceless().shifted(SAT5_IDENTITY_OFFSET)


def sat8_hamiltonian() -> Hamiltonian:
    """The 8-qubit diagonal operator fixture, verbatim."""
    return parse_coefficient_table(SAT8_TABLE)


def tfim_fixture(n: int) -> Hamiltonian:
    """Critical periodic TFIM chain at J = h_x = 1/sqrt(2)."""
    return tfim_hamiltonian(n, TFIM_COUPLING, TFIM_COUPLING, periodic=True)


PROBLEMS = {
    "tfim4": lambda: tfim_fixture(4),
    "tfim8": lambda: tfim_fixture(8),
    "sat5": sat5_hamiltonian,
    "sat8": sat8_hamiltonian,
}
