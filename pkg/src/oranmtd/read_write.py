import json
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from .agent import PolicyConfig, TrainedPolicy
from .errors import InvalidInputError
from .harness import CSV_COLUMNS, ResultRow
from .mtd import Ensemble
from .numerics import Mlp
from .xai import DetectionResult, FeatureVector

POLICY_MAGIC = 'ORANMTD-POLICY 1'
ENSEMBLE_MAGIC = 'ORANMTD-ENSEMBLE 1'
MANIFEST_NAME = 'manifest.yaml'
_FLOAT = np.dtype('<f8')


def emit_csv(rows, path):
    """Write result rows, sorted, with six decimals and ``\\n`` line endings

    Parameters
    ----------
    rows : list of ResultRow
    path : str or Path

    Returns
    -------
    path : Path
    """
    path = Path(path)
    rows = sorted(rows, key=ResultRow.sort_key)
    frame = pd.DataFrame([r.as_tuple() for r in rows], columns=list(CSV_COLUMNS))
    frame = frame.astype({'seed': 'int64', 'episodes': 'int64', 'arrival_rate': 'float64',
                          'departure_rate': 'float64', 'mean_admission_rate': 'float64',
                          'std_admission_rate': 'float64', 'wall_time_s': 'float64'})
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format='%.6f', lineterminator='\n', na_rep='nan')
    except OSError as err:
        raise OSError('cannot write results to {}: {}'.format(path, err)) from err
    return path


def read_csv(path):
    """Parse a file written by ``emit_csv`` back into ResultRow objects."""
    frame = pd.read_csv(path, dtype={'scenario': str})
    if tuple(frame.columns) != CSV_COLUMNS:
        raise InvalidInputError('unexpected CSV header in {}: {}'.format(path, list(frame.columns)))
    return [ResultRow(str(r.scenario), float(r.arrival_rate), float(r.departure_rate), int(r.seed),
                      float(r.mean_admission_rate), float(r.std_admission_rate), int(r.episodes),
                      float(r.wall_time_s))
            for r in frame.itertuples(index=False)]


def save_policy(policy, path):
    """Write a policy checkpoint

    Line 1 is ``ORANMTD-POLICY 1``, line 2 a JSON header with layer sizes,
    config, metadata and parameter shapes, then the little-endian float64
    actor parameters followed by the critic's, each layer weights (row-major)
    then biases.
    """
    path = Path(path)
    header = {
        'actor_layers': policy.actor.layer_sizes,
        'critic_layers': policy.critic.layer_sizes,
        'config': policy.config.to_dict(),
        'metadata': {'updates': policy.updates, 'poisoned': policy.poisoned},
        'shapes': {
            'actor': [list(w.shape) for w in policy.actor.weights],
            'critic': [list(w.shape) for w in policy.critic.weights],
        },
        'num_parameters': [policy.actor.num_parameters, policy.critic.num_parameters],
    }
    with path.open('wb') as f:
        f.write((POLICY_MAGIC + '\n').encode('ascii'))
        f.write((json.dumps(header, sort_keys=True) + '\n').encode('utf-8'))
        f.write(policy.actor.get_flat().astype(_FLOAT).tobytes())
        f.write(policy.critic.get_flat().astype(_FLOAT).tobytes())
    return path


def load_policy(path):
    path = Path(path)
    data = path.read_bytes()
    magic, _, rest = data.partition(b'\n')
    if magic.decode('ascii', errors='replace') != POLICY_MAGIC:
        raise InvalidInputError('{} is not a policy checkpoint'.format(path))
    header_line, _, payload = rest.partition(b'\n')
    header = json.loads(header_line.decode('utf-8'))
    num_actor, num_critic = header['num_parameters']
    theta = np.frombuffer(payload, dtype=_FLOAT)
    if theta.size != num_actor + num_critic:
        raise InvalidInputError('{} holds {} parameters, header says {}'.format(
            path, theta.size, num_actor + num_critic))

    actor = Mlp(header['actor_layers'])
    critic = Mlp(header['critic_layers'])
    actor.set_flat(theta[:num_actor].astype(np.float64))
    critic.set_flat(theta[num_actor:].astype(np.float64))
    metadata = header['metadata']
    return TrainedPolicy(actor, critic, PolicyConfig.from_dict(header['config']), metadata['updates'],
                         metadata['poisoned'])


def save_ensemble(ensemble, directory):
    """Member checkpoints plus a manifest; the poisoned index sits under ``ground_truth``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    members = []
    for i, member in enumerate(ensemble.members):
        name = 'member{}.policy'.format(i)
        save_policy(member, directory / name)
        members.append({'file': name, 'config': member.config.to_dict()})
    manifest = {
        'format': ENSEMBLE_MAGIC,
        'selection_seed': ensemble.selection_seed,
        'members': members,
        'active': list(ensemble.active),
        'ground_truth': {'poisoned_index': ensemble.ground_truth()},
    }
    with (directory / MANIFEST_NAME).open('w') as f:
        yaml.safe_dump(manifest, f, sort_keys=False)
    return directory


def load_ensemble(directory):
    directory = Path(directory)
    with (directory / MANIFEST_NAME).open() as f:
        manifest = yaml.safe_load(f)
    if manifest.get('format') != ENSEMBLE_MAGIC:
        raise InvalidInputError('{} is not an ensemble checkpoint'.format(directory))
    members = [load_policy(directory / m['file']) for m in manifest['members']]
    return Ensemble(members, manifest['ground_truth']['poisoned_index'], manifest['active'],
                    selection_seed=manifest.get('selection_seed', 0))


def save_detection(detection, path):
    """JSON dump of a detection result, enough to render its report later."""
    payload = {
        'flagged': detection.flagged,
        'suspect': detection.suspect,
        'scores': [float(s) for s in detection.scores],
        'window_count': detection.window_count,
        'features': [vars(f) for f in detection.features],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + '\n')
    return Path(path)


def load_detection(path):
    payload = json.loads(Path(path).read_text())
    features = [FeatureVector(**f) for f in payload['features']]
    return DetectionResult(payload['flagged'], payload['suspect'], np.array(payload['scores']), features,
                           payload['window_count'])


def write_report(report, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_text())
    return path
