import json
from typing import Any, Dict, List

from preprocessor import Certificate


def format_complex(z: complex, digits: int = 10) -> str:
    """Real numbers print without an imaginary part."""
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z.real)):
        return f"{z.real:.{digits}g}"
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}j"


def _format_slope(slope) -> str:
    if slope is None:
        return "-"
    if slope == float("inf"):
        return "inf"
    return f"{slope:.3f}"


def render_text(certificate: Certificate, show_timings: bool = False) -> str:
    lines: List[str] = [f"status: {certificate.status}"]
    diagnostics: Dict[str, Any] = certificate.diagnostics

    for note in diagnostics.get("notes", []):
        lines.append(f"note: {note}")

    if certificate.tropisms:
        lines.append("tropisms: " + " ".join(str(t) for t in certificate.tropisms))
    else:
        trop_f = " ".join(f"({u},{v})" for u, v in diagnostics.get("tropicalization_f", []))
        trop_g = " ".join(f"({u},{v})" for u, v in diagnostics.get("tropicalization_g", []))
        lines.append("tropisms: none")
        lines.append(f"  Trop(f): {trop_f or 'empty'}")
        lines.append(f"  Trop(g): {trop_g or 'empty'}")

    if certificate.roots:
        lines.append("initial roots:")
        systems = {tuple(s["tropism"]): s for s in diagnostics.get("initial_systems", [])}
        for t, roots in certificate.roots.items():
            system = systems.get(t.pair(), {})
            header = f"  {t}: degrees {system.get('degree_f', '?')}, {system.get('degree_g', '?')}"
            if system.get("method") == "sylvester":
                header += f", rank {system['rank']}/{system['size']}"
            lines.append(header)
            if not roots:
                lines.append("    none")
            for r in roots:
                extra = f", multiplicity {r.multiplicity}" if r.multiplicity > 1 else ""
                lines.append(
                    f"    z = {format_complex(r.z)} (residuals {r.residual_f:.1e}, {r.residual_g:.1e}{extra})"
                )

    if certificate.germs:
        lines.append("germs:")
        for germ in certificate.germs:
            if germ.exact:
                lines.append(f"  {germ.tropism}: Y = {format_complex(germ.c0)} exactly")
                continue
            lines.append(
                f"  {germ.tropism}: X = t, Y = {format_complex(germ.c0)} + ({format_complex(germ.c1)}) t^{germ.w}"
                f"  slopes {_format_slope(germ.slope_f)}, {_format_slope(germ.slope_g)}"
            )

    rejected = [a for a in diagnostics.get("germ_attempts", []) if not a["accepted"]]
    if rejected:
        lines.append("rejected roots:")
        for attempt in rejected:
            u, v = attempt["tropism"]
            z = complex(attempt["root"]["re"], attempt["root"]["im"])
            exponents = attempt.get("exponents")
            data = f" (k,l,a1,b1) = {tuple(exponents)}" if exponents else ""
            lines.append(f"  ({u},{v}) at {format_complex(z)}: {attempt['reason']}{data}")

    if show_timings and certificate.timings:
        lines.append("timings: " + ", ".join(f"{k} {v * 1000:.1f} ms" for k, v in certificate.timings.items()))
    return "\n".join(lines) + "\n"


def render_structured(certificate: Certificate, show_timings: bool = False) -> str:
    return json.dumps(certificate.to_dict(with_timings=show_timings), indent=2) + "\n"


def parse_structured(text: str) -> Certificate:
    return Certificate.from_dict(json.loads(text))


def render(certificate: Certificate, fmt: str = "text", show_timings: bool = False) -> str:
    if fmt == "structured":
        return render_structured(certificate, show_timings)
    return render_text(certificate, show_timings)
