"""Console formatting of merits, verification results and search summaries."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.codec.quality import QualityReport
from src.metrics.merit import MeritReport


@dataclass
class VerifyResult:
    id: str
    passed: bool
    counted_ops: Optional[Tuple[int, int]] = None
    published_ops: Optional[Tuple[int, int]] = None
    bit_growth: Optional[int] = None
    vectors_checked: int = 0
    multiplications: int = 0
    failures: List[str] = field(default_factory=list)


class ReportFormatter:
    """Format results for console display."""
    
    @staticmethod
    def format_merits(name: str, report: MeritReport, rho: float) -> str:
        """
        Format a merit report.
        
        Args:
            name: Transform label
            report: Evaluated merits
            rho: Correlation of the model used for Cg, eta and MSE
        
        Returns:
            Formatted message string
        """
        ref = f"{report.rho_ref:g}" if report.rho_ref is not None else "-"
        return f"""
{name} @ rho={rho:g} (reference KLT rho={ref})
Coding gain:          {report.cg_db:.4f} dB
Transform efficiency: {report.eta_pct:.4f} %
MSE:                  {report.mse:.4f}
Total error energy:   {report.epsilon:.4f}
""".strip()
    
    @staticmethod
    def format_verify(result: VerifyResult) -> str:
        """Format one fast-algorithm verification."""
        icon = "✅" if result.passed else "❌"
        lines = [f"{icon} {result.id}: {'PASS' if result.passed else 'FAIL'}"]
        if result.counted_ops is not None:
            adds, shifts = result.counted_ops
            published = ""
            if result.published_ops is not None:
                published = f" (published {result.published_ops[0]} adds, {result.published_ops[1]} shifts)"
            lines.append(f"   ops: {adds} adds, {shifts} shifts{published}")
        if result.bit_growth is not None:
            lines.append(f"   bit growth: {result.bit_growth}")
        if result.vectors_checked:
            lines.append(f"   random vectors: {result.vectors_checked}, multiplications: {result.multiplications}")
        lines.extend(f"   {failure}" for failure in result.failures)
        return "\n".join(lines)
    
    @staticmethod
    def format_quality(transform: str, r: int, report: QualityReport) -> str:
        """Format pixel-domain and float-domain image quality."""
        lines = [
            f"{transform}, r={r} (compression {100 * (64 - r) / 64:.1f}%)",
            f"PSNR:  {ReportFormatter._format_db(report.psnr_db)}",
            f"MSSIM: {report.mssim:.4f}",
        ]
        if report.psnr_float_db is not None:
            lines.append(f"PSNR (float):  {ReportFormatter._format_db(report.psnr_float_db)}")
            lines.append(f"MSSIM (float): {report.mssim_float:.4f}")
        return "\n".join(lines)
    
    @staticmethod
    def format_search_summary(report) -> str:
        """Format the shortlist and cluster representatives of a search run."""
        counts = report.to_dict()["counts"]
        lines = [
            f"Candidates: {counts['candidates']} (skipped {counts['skipped']})",
            f"Optima: {counts['optima']} -> shortlist {counts['shortlist']} "
            f"({counts['reduction_pct']:.2f}% reduction)",
        ]
        table = report.merit_table()
        if not table.empty:
            lines.append(table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        for cluster, entries in report.representatives.items():
            lines.append(f"Cluster {cluster}: {', '.join(e.id for e in entries) or '-'}")
        hits = report.published_hits()
        found = [tid for tid, h in hits.items() if h]
        lines.append(f"Published matrices found: {', '.join(found) or 'none'}")
        return "\n".join(lines)
    
    @staticmethod
    def _format_db(value: float) -> str:
        """Format a dB figure, with the identical-image sentinel."""
        if math.isinf(value):
            return "inf (identical)"
        return f"{value:.4f} dB"
