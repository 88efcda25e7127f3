import sys

from ..utils import fmt

HEADER = ('d', 'lambda', 'r0', 'h3_ok', 'agg_residual')
FLOAT_FORMAT = '%.12g'


def write_sweep(result, path=None, provenance=None):
    """Writes a sweep as csv

    Rows follow the header ``d,lambda,r0,h3_ok,agg_residual`` with 12
    significant digits. The limits and the provenance follow as
    ``# key=value`` comment lines.

    Parameters
    ----------
    result : patchr0.asymptotics.SweepResult
    path : str or None
        Output file; stdout when None
    provenance : dict of str : str or None
        Extra footer entries, for example the model file's sha256

    """
    frame = result.to_dataframe()
    frame['h3_ok'] = frame['h3_ok'].map({True: 'true', False: 'false'})
    footer = [('lambda_at0', fmt(result.limits.lambda_at0)),
              ('lambda_tilde', fmt(result.limits.lambda_tilde)),
              ('r0_at0', fmt(result.limits.r0_at0)),
              ('r0_tilde', fmt(result.limits.r0_tilde))]
    if provenance:
        footer.extend(sorted(provenance.items()))
    if path is None:
        _write(frame, footer, sys.stdout)
        return
    with open(path, 'w', newline='') as fout:
        _write(frame, footer, fout)


def _write(frame, footer, fout):
    frame.to_csv(fout, index=False, columns=list(HEADER),
                 float_format=FLOAT_FORMAT, na_rep='nan', lineterminator='\n')
    for key, value in footer:
        fout.write('# {}={}\n'.format(key, value))
