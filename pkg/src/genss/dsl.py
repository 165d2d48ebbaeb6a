"""Problem DSL: parsing and rendering of scalars, kernels and operators.

Text grammar (whitespace-insensitive)::

    dist    := ['-'] term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := scalar | kernelpiece
    scalar  := number ['/' number] ['i'] | 'i' | 's' | 'lam' | 'delta0'
             | 'delta' deriv '(0)' | 'dev[' cutkernel ']' | '(' dist ')'
             with an optional trailing '^' ['-'] integer
    kernelpiece := 'delta' deriv ['(t)'] | 'H' ['(t)'] | 't' ['^' int]
             | 'exp(' rate 't)' | 'sin(' rate 't)' | 'cos(' rate 't)'
    deriv   := "'"* | '^(' int ')'

Each term multiplies its scalar factors into a generalized-scalar weight
and folds its kernel pieces into one canonical kernel (H makes it a cut
kernel; sin/cos expand into conjugate exponential pairs).  Rendering is the
inverse and round-trips through the parser.

Operators parse either as a descending coefficient list ("1,0,9") or as a
factored polynomial in x ("(x+1)^2*(x^2+4)"), kept exact over rationals.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .errors import ParseError
from .exactnum import CNum
from .green import PolyOp
from .genfunc import Dist, Kernel, KIND_CUT, KIND_DELTA, KIND_SMOOTH
from .scalars import Atom, GenScalar, delta_point, odd_cut_atom, S, LAM

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<prime>')
  | (?P<op>\^|\*|\+|-|/|\(|\)|\[|\]|,)
""", re.VERBOSE)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(f"unrecognized character {text[pos]!r}", pos)
            pos = m.end()
            for kind in ("number", "name", "prime", "op"):
                val = m.group(kind)
                if val is not None:
                    self.items.append((kind, val, m.start()))
                    break
        self.i = 0

    def peek(self, offset: int = 0) -> Tuple[str, str, int]:
        j = self.i + offset
        if j < len(self.items):
            return self.items[j]
        return ("end", "", len(self.text))

    def next(self) -> Tuple[str, str, int]:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"found {val or 'end of input'!r}", pos, (value,))

    def accept(self, value: str) -> bool:
        if self.peek()[1] == value:
            self.i += 1
            return True
        return False


# -- parsing -----------------------------------------------------------------

_SCALAR_ONE = GenScalar.from_value(1)


class _TermPart:
    """Accumulator for one '*'-joined term."""

    def __init__(self):
        self.scalar = _SCALAR_ONE
        self.delta_order: Optional[int] = None
        self.has_h = False
        self.power = 0
        self.rate = CNum.make(0)
        self.trig: Optional[Tuple[str, CNum]] = None
        self.saw_kernel = False


def _parse_number(tokens: _Tokens) -> Fraction:
    kind, val, pos = tokens.next()
    if kind != "number":
        raise ParseError(f"found {val or 'end of input'!r}", pos, ("number",))
    return Fraction(val)


def _parse_rational(tokens: _Tokens) -> Union[Fraction, float]:
    value = _parse_number(tokens)
    if tokens.peek()[1] == "/" and tokens.peek(1)[0] == "number":
        tokens.next()
        value = value / _parse_number(tokens)
    return value


def _parse_signed_rate(tokens: _Tokens) -> CNum:
    """A rate inside exp/sin/cos, up to the closing 't': -2, 3/2, (1+2*i)."""
    sign = 1
    while tokens.peek()[1] in ("+", "-"):
        if tokens.next()[1] == "-":
            sign = -sign
    kind, val, pos = tokens.peek()
    if val == "(":
        tokens.next()
        expr = _parse_sum(tokens, scalar_only=True)
        tokens.expect(")")
        const = expr.scalar.constant_value() if isinstance(expr, _TermPart) \
            else expr.constant_value()
        if const is None:
            raise ParseError("rate must be a complex constant", pos)
        return CNum.make(sign) * const
    if kind == "number":
        rat = _parse_rational(tokens)
        out = CNum.make(rat)
        if tokens.peek() == ("name", "i", tokens.peek()[2]) and tokens.peek()[1] == "i":
            tokens.next()
            out = out * CNum.make(0, 1)
        return CNum.make(sign) * out
    if val == "t":
        return CNum.make(sign)
    raise ParseError(f"found {val or 'end of input'!r}", pos, ("rate",))


def _parse_deriv_marker(tokens: _Tokens) -> int:
    """Primes or ^(n) immediately after 'delta'."""
    n = 0
    while tokens.peek()[0] == "prime":
        tokens.next()
        n += 1
    if n == 0 and tokens.peek()[1] == "^" and tokens.peek(1)[1] == "(":
        tokens.next()
        tokens.expect("(")
        n = int(_parse_number(tokens))
        tokens.expect(")")
    return n


def _parse_exponent(tokens: _Tokens) -> int:
    """Optional trailing ^k or ^-k; returns 1 when absent."""
    if tokens.peek()[1] != "^":
        return 1
    tokens.next()
    sign = -1 if tokens.accept("-") else 1
    return sign * int(_parse_number(tokens))


def _fold_factor(tokens: _Tokens, part: _TermPart, scalar_only: bool) -> None:
    kind, val, pos = tokens.peek()

    def kernel_guard():
        if scalar_only:
            raise ParseError("kernel factor in scalar context", pos)
        part.saw_kernel = True

    if kind == "number":
        rat = _parse_rational(tokens)
        coeff = GenScalar.from_value(rat)
        if tokens.peek()[1] == "i":
            tokens.next()
            coeff = coeff * CNum.make(0, 1)
        exp = _parse_exponent(tokens)
        part.scalar = part.scalar * coeff ** exp
        return
    if kind == "name":
        if val == "i":
            tokens.next()
            part.scalar = part.scalar * GenScalar.from_value(CNum.make(0, 1)) \
                ** _parse_exponent(tokens)
            return
        if val == "s":
            tokens.next()
            part.scalar = part.scalar * S ** _parse_exponent(tokens)
            return
        if val == "lam":
            tokens.next()
            part.scalar = part.scalar * LAM ** _parse_exponent(tokens)
            return
        if val == "delta0":
            tokens.next()
            part.scalar = part.scalar * delta_point(0) ** _parse_exponent(tokens)
            return
        if val == "dev":
            tokens.next()
            tokens.expect("[")
            inner = _parse_term(tokens, scalar_only=False)
            tokens.expect("]")
            atom_gs = _dev_atom_from_term(inner, pos)
            part.scalar = part.scalar * atom_gs ** _parse_exponent(tokens)
            return
        if val == "delta":
            tokens.next()
            n = _parse_deriv_marker(tokens)
            if tokens.peek()[1] == "(":
                save = tokens.i
                tokens.next()
                nxt_kind, nxt_val, _ = tokens.next()
                if nxt_val == "0":
                    tokens.expect(")")
                    part.scalar = part.scalar * delta_point(n) \
                        ** _parse_exponent(tokens)
                    return
                if nxt_val == "t":
                    tokens.expect(")")
                else:
                    tokens.i = save
            kernel_guard()
            if part.delta_order is not None or part.has_h or part.power or \
                    not part.rate.is_zero or part.trig:
                raise ParseError("delta kernels do not combine with other kernels", pos)
            part.delta_order = n
            return
        if val == "H":
            tokens.next()
            if tokens.peek()[1] == "(":
                tokens.next()
                tokens.expect("t")
                tokens.expect(")")
            kernel_guard()
            part.has_h = True
            return
        if val == "t":
            tokens.next()
            kernel_guard()
            part.power += _parse_exponent(tokens)
            return
        if val in ("exp", "sin", "cos"):
            tokens.next()
            tokens.expect("(")
            rate = _parse_signed_rate(tokens)
            tokens.expect("t")
            tokens.expect(")")
            kernel_guard()
            if val == "exp":
                part.rate = part.rate + rate
            else:
                if part.trig is not None:
                    raise ParseError("at most one trigonometric factor per term", pos)
                if rate.im != 0:
                    raise ParseError("trigonometric frequency must be real", pos)
                part.trig = (val, rate)
            return
        raise ParseError(f"unknown name {val!r}", pos,
                         ("delta", "H", "exp", "sin", "cos", "t", "s", "i",
                          "lam", "delta0", "dev"))
    if val == "(":
        tokens.next()
        inner = _parse_sum(tokens, scalar_only=True)
        tokens.expect(")")
        part.scalar = part.scalar * inner ** _parse_exponent(tokens)
        return
    raise ParseError(f"found {val or 'end of input'!r}", pos,
                     ("number", "name", "("))


def _dev_atom_from_term(part: _TermPart, pos: int) -> GenScalar:
    if part.delta_order is not None or not part.has_h or part.trig is not None:
        raise ParseError("dev[...] expects a cut kernel H*t^m*exp(at)", pos)
    if part.scalar != _SCALAR_ONE:
        raise ParseError("dev[...] kernel must carry no coefficient", pos)
    sign, atom = odd_cut_atom(part.power, part.rate)
    if atom is None:
        return GenScalar()
    return GenScalar.from_atom(atom, 1, sign)


def _parse_term(tokens: _Tokens, scalar_only: bool) -> _TermPart:
    part = _TermPart()
    _fold_factor(tokens, part, scalar_only)
    while tokens.accept("*"):
        _fold_factor(tokens, part, scalar_only)
    return part


def _term_to_dist(part: _TermPart) -> Dist:
    if part.delta_order is not None:
        return Dist.delta(part.delta_order, part.scalar)
    if not part.saw_kernel:
        return Dist.smooth_exp(0, 0, part.scalar)
    kind = KIND_CUT if part.has_h else KIND_SMOOTH
    if part.trig is None:
        return Dist.single(Kernel(kind, part.power, part.rate), part.scalar)
    name, omega = part.trig
    if part.rate.im != 0:
        raise ParseError("trig factors combine only with real exponential rates", 0)
    alpha = -part.rate
    maker = {
        ("sin", KIND_CUT): Dist.cut_sin, ("cos", KIND_CUT): Dist.cut_cos,
        ("sin", KIND_SMOOTH): Dist.smooth_sin,
        ("cos", KIND_SMOOTH): Dist.smooth_cos,
    }[(name, kind)]
    return maker(omega, alpha, part.power, part.scalar)


def _parse_sum(tokens: _Tokens, scalar_only: bool):
    """Sum of terms; returns GenScalar (scalar_only) or Dist."""
    total_scalar = GenScalar()
    total_dist = Dist()
    sign = 1
    if tokens.peek()[1] in ("+", "-"):
        if tokens.next()[1] == "-":
            sign = -1
    while True:
        part = _parse_term(tokens, scalar_only)
        if scalar_only:
            total_scalar = total_scalar + part.scalar * CNum.make(sign)
        else:
            total_dist = total_dist + _term_to_dist(part) * CNum.make(sign)
        nxt = tokens.peek()[1]
        if nxt == "+":
            tokens.next()
            sign = 1
        elif nxt == "-":
            tokens.next()
            sign = -1
        else:
            break
    return total_scalar if scalar_only else total_dist


def parse_forcing(text: str) -> Dist:
    """Parse a generalized function from the text grammar."""
    tokens = _Tokens(text)
    out = _parse_sum(tokens, scalar_only=False)
    kind, val, pos = tokens.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return out


def parse_scalar(text: str) -> GenScalar:
    tokens = _Tokens(text)
    out = _parse_sum(tokens, scalar_only=True)
    kind, val, pos = tokens.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return out


# -- operator parsing -----------------------------------------------------------

def parse_operator(text: str) -> PolyOp:
    """Descending coefficient list "a_k,...,a_0" or factored form in x."""
    text = text.strip()
    if "x" in text:
        return _parse_factored(text)
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) < 2:
        raise ParseError("need at least two coefficients", 0)
    coeffs = []
    for p in parts:
        try:
            coeffs.append(Fraction(p))
        except ValueError:
            try:
                coeffs.append(float(p))
            except ValueError:
                raise ParseError(f"bad coefficient {p!r}", text.find(p)) from None
    return PolyOp.from_descending(coeffs)


def _parse_factored(text: str) -> PolyOp:
    tokens = _Tokens(text)
    total = [CNum.make(1)]
    hints: List[Tuple[CNum, int]] = []
    hint_ok = True
    first = True
    while tokens.peek()[0] != "end":
        if not first:
            tokens.expect("*")
        first = False
        tokens.expect("(")
        poly = _parse_poly_sum(tokens)
        tokens.expect(")")
        power = 1
        if tokens.accept("^"):
            power = int(_parse_number(tokens))
        factor_op = PolyOp.from_ascending(poly) if len(poly) > 1 else None
        if factor_op is None:
            raise ParseError("constant factor in operator", tokens.peek()[2])
        froots = _exact_factor_roots(factor_op)
        if froots is None:
            hint_ok = False
        else:
            for lam, mult in froots:
                hints.append((lam, mult * power))
        for _ in range(power):
            total = _poly_mul_cnum(total, poly)
    if len(total) < 2:
        raise ParseError("operator degree must be at least 1", 0)
    merged = _merge_hints(hints) if hint_ok else None
    return PolyOp.from_ascending(total, merged)


def _merge_hints(hints: List[Tuple[CNum, int]]) -> List[Tuple[CNum, int]]:
    acc: dict = {}
    for lam, mult in hints:
        acc[lam] = acc.get(lam, 0) + mult
    return [(lam, m) for lam, m in acc.items()]


def _exact_factor_roots(op: PolyOp) -> Optional[List[Tuple[CNum, int]]]:
    if op.degree == 1:
        return [(-op.coeffs[0] / op.coeffs[1], 1)]
    if op.degree == 2 and op.is_exact:
        a0, a1, a2 = op.coeffs
        disc = a1 * a1 - CNum.make(4) * a2 * a0
        if disc.is_zero:
            return [(-a1 / (CNum.make(2) * a2), 2)]
        sq = disc.sqrt_exact()
        if sq is not None:
            two_a = CNum.make(2) * a2
            return [((-a1 + sq) / two_a, 1), ((-a1 - sq) / two_a, 1)]
    return None


def _poly_mul_cnum(a: List[CNum], b: List[CNum]) -> List[CNum]:
    out = [CNum.make(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def _parse_poly_sum(tokens: _Tokens) -> List[CNum]:
    coeffs: List[CNum] = [CNum.make(0)]
    sign = 1
    if tokens.peek()[1] in ("+", "-"):
        if tokens.next()[1] == "-":
            sign = -1
    while True:
        coeff, power = _parse_poly_term(tokens)
        while len(coeffs) <= power:
            coeffs.append(CNum.make(0))
        coeffs[power] = coeffs[power] + CNum.make(sign) * coeff
        nxt = tokens.peek()[1]
        if nxt == "+":
            tokens.next()
            sign = 1
        elif nxt == "-":
            tokens.next()
            sign = -1
        else:
            break
    return coeffs


def _parse_poly_term(tokens: _Tokens) -> Tuple[CNum, int]:
    kind, val, pos = tokens.peek()
    coeff = CNum.make(1)
    power = 0
    saw_number = False
    if kind == "number":
        saw_number = True
        coeff = CNum.make(_parse_rational(tokens))
        tokens.accept("*")
        kind, val, pos = tokens.peek()
    if val == "x":
        tokens.next()
        power = 1
        if tokens.accept("^"):
            power = int(_parse_number(tokens))
    elif not saw_number:
        raise ParseError(f"found {val or 'end of input'!r}", pos, ("number", "x"))
    return coeff, power


# -- rendering ----------------------------------------------------------------------

def _frac_str(q) -> str:
    if isinstance(q, Fraction):
        if q.denominator == 1:
            return str(q.numerator)
        return f"{q.numerator}/{q.denominator}"
    return repr(float(q))


def _cnum_str(c: CNum, wrap_products: bool, fmt: str = "text") -> Tuple[str, bool]:
    """Render a CNum; returns (text, is_negatable) where is_negatable means a
    leading '-' can be factored out by the caller."""
    frac = _frac_str if fmt == "text" else _frac_latex
    mul = "*" if fmt == "text" else r" \, "
    imag = "i" if fmt == "text" else "i"
    if c.im == 0:
        return frac(c.re), True
    if c.re == 0:
        if c.im == 1:
            return imag, True
        if c.im == -1:
            return f"-{imag}", True
        return f"{frac(c.im)}{mul}{imag}", True
    re_s = frac(c.re)
    im_s = imag if c.im == 1 else (f"-{imag}" if c.im == -1
                                   else f"{frac(c.im)}{mul}{imag}")
    joined = f"{re_s}+{im_s}" if not im_s.startswith("-") else f"{re_s}{im_s}"
    if wrap_products:
        return (f"({joined})" if fmt == "text" else rf"\left({joined}\right)"), False
    return joined, False


def _frac_latex(q) -> str:
    if isinstance(q, Fraction):
        if q.denominator == 1:
            return str(q.numerator)
        sign = "-" if q < 0 else ""
        return rf"{sign}\tfrac{{{abs(q.numerator)}}}{{{q.denominator}}}"
    return repr(float(q))


def _atom_str(atom: Atom, exp: int, fmt: str) -> str:
    if atom.kind == "s":
        base = "s"
    elif atom.kind == "log":
        base = "lam" if fmt == "text" else r"\lambda"
    elif atom.kind == "delta_even":
        n = 2 * atom.k
        if fmt == "text":
            base = "delta(0)" if n == 0 else f"delta^({n})(0)"
        else:
            base = r"\delta(0)" if n == 0 else rf"\delta^{{({n})}}(0)"
    else:
        kernel = Kernel(KIND_CUT, atom.k, atom.lam)
        inner = _kernel_str(kernel, fmt)
        base = f"dev[{inner}]" if fmt == "text" else rf"\mathrm{{dev}}[{inner}]"
    if exp == 1:
        return base
    if fmt == "text":
        return f"{base}^{exp}"
    return rf"{base}^{{{exp}}}"


def render_scalar(gs: GenScalar, fmt: str = "text") -> str:
    if gs.is_zero:
        return "0"
    mul = "*" if fmt == "text" else r"\,"
    chunks: List[str] = []
    for mono, coeff in gs.terms:
        factors = [_atom_str(a, e, fmt) for a, e in mono]
        c_str, _ = _cnum_str(coeff, wrap_products=bool(factors), fmt=fmt)
        if factors:
            if c_str == "1":
                body = mul.join(factors)
            elif c_str == "-1":
                body = "-" + mul.join(factors)
            else:
                body = mul.join([c_str] + factors)
        else:
            body = c_str
        chunks.append(body)
    out = chunks[0]
    for body in chunks[1:]:
        out += body if body.startswith("-") else "+" + body
    return out


def _rate_str(lam: CNum, fmt: str) -> str:
    """Exponent rate as it appears inside exp( .. t)."""
    if lam.im == 0:
        return _frac_str(lam.re) if fmt == "text" else _frac_latex(lam.re)
    s, _ = _cnum_str(lam, wrap_products=False, fmt=fmt)
    return f"({s})" if fmt == "text" else rf"\left({s}\right)"


def _kernel_str(kernel: Kernel, fmt: str, trig: Optional[Tuple[str, CNum]] = None,
                alpha: Optional[CNum] = None) -> str:
    mul = "*" if fmt == "text" else r"\,"
    parts: List[str] = []
    if kernel.kind == KIND_DELTA:
        n = kernel.power
        if fmt == "text":
            mark = "'" * n if n <= 2 else f"^({n})"
            return f"delta{mark}(t)"
        mark = "'" * n if n <= 2 else f"^{{({n})}}"
        return rf"\delta{mark}(t)"
    if kernel.kind == KIND_CUT:
        parts.append("H(t)")
    m = kernel.power
    if m >= 1:
        if fmt == "text":
            parts.append("t" if m == 1 else f"t^{m}")
        else:
            parts.append("t" if m == 1 else f"t^{{{m}}}")
    lam = kernel.lam if alpha is None else -alpha
    if not lam.is_zero:
        if fmt == "text":
            parts.append(f"exp({_rate_str(lam, fmt)}t)")
        else:
            parts.append(rf"e^{{{_rate_str(lam, fmt)}t}}")
    if trig is not None:
        name, omega = trig
        w = _frac_str(omega.re) if fmt == "text" else _frac_latex(omega.re)
        w = "" if w == "1" else w
        if fmt == "text":
            parts.append(f"{name}({w}t)")
        else:
            parts.append(rf"\{name}({w}t)")
    if not parts:
        return "1"
    return mul.join(parts)


def _scalar_prefix(coeff: GenScalar, fmt: str) -> Tuple[str, str]:
    """(sign, body) prefix for a kernel coefficient; body '' means 1."""
    const = coeff.constant_value()
    if const is not None:
        s, _neg = _cnum_str(const, wrap_products=True, fmt=fmt)
        if s == "1":
            return "+", ""
        if s == "-1":
            return "-", ""
        if s.startswith("-"):
            return "-", s[1:]
        return "+", s
    if len(coeff.terms) == 1:
        body = render_scalar(coeff, fmt)
        if body.startswith("-"):
            return "-", body[1:]
        return "+", body
    body = render_scalar(coeff, fmt)
    wrapped = f"({body})" if fmt == "text" else rf"\left({body}\right)"
    return "+", wrapped


def render_dist(dist: Dist, fmt: str = "text") -> str:
    """Canonical text/latex rendering with conjugate pairs recombined."""
    if fmt not in ("text", "latex"):
        raise ValueError(f"unknown format {fmt!r}")
    if dist.is_zero:
        return "0"
    mul = "*" if fmt == "text" else r"\,"
    pieces: List[Tuple[str, str]] = []  # (sign, body)
    consumed = set()
    terms = list(dist.terms)
    index = {(k.kind, k.power, k.lam): i for i, (k, _) in enumerate(terms)}
    for i, (kernel, coeff) in enumerate(terms):
        if i in consumed:
            continue
        if kernel.kind != KIND_DELTA and kernel.lam.im != 0:
            partner = index.get((kernel.kind, kernel.power,
                                 kernel.lam.conjugate()))
            if partner is not None and partner != i:
                consumed.add(partner)
                c_plus = coeff if kernel.lam.im > 0 else terms[partner][1]
                c_minus = terms[partner][1] if kernel.lam.im > 0 else coeff
                lam_p = kernel.lam if kernel.lam.im > 0 else terms[partner][0].lam
                omega = CNum.make(lam_p.im)
                alpha = CNum.make(-lam_p.re)
                c_cos = c_plus + c_minus
                c_sin = (c_plus - c_minus) * CNum.make(0, 1)
                for name, cc in (("cos", c_cos), ("sin", c_sin)):
                    if cc.is_zero:
                        continue
                    body = _kernel_str(kernel, fmt, trig=(name, omega),
                                       alpha=alpha)
                    sign, prefix = _scalar_prefix(cc, fmt)
                    pieces.append((sign, f"{prefix}{mul}{body}" if prefix else body))
                continue
        body = _kernel_str(kernel, fmt)
        sign, prefix = _scalar_prefix(coeff, fmt)
        if body == "1" and prefix:
            pieces.append((sign, prefix))
        else:
            pieces.append((sign, f"{prefix}{mul}{body}" if prefix else body))
    out = ""
    for j, (sign, body) in enumerate(pieces):
        if j == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" + {body}" if sign == "+" else f" - {body}"
    return out


def render_operator(op: PolyOp, fmt: str = "text") -> str:
    """Descending polynomial in x, e.g. 'x^2 + 2x + 2'."""
    chunks = []
    for power in range(op.degree, -1, -1):
        c = op.coeffs[power]
        if c.is_zero:
            continue
        c_str, _ = _cnum_str(c, wrap_products=True, fmt=fmt)
        if power == 0:
            body = c_str
        else:
            x = "x" if power == 1 else (f"x^{power}" if fmt == "text"
                                        else f"x^{{{power}}}")
            if c_str == "1":
                body = x
            elif c_str == "-1":
                body = f"-{x}"
            else:
                body = f"{c_str}{'*' if fmt == 'text' else ' '}{x}"
        chunks.append(body)
    if not chunks:
        return "0"
    out = chunks[0]
    for body in chunks[1:]:
        out += f" - {body[1:]}" if body.startswith("-") else f" + {body}"
    return out
