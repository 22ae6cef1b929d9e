"""Event-driven simulation of miners exchanging blocks and weak headers.

Strong blocks are discrete events.  Weak headers are generated per miner in
time batches and kept as numpy arrays ("chunks") of found times plus one
delay per recipient, so a block never costs a Python loop over its ~1000
weak headers.  Each miner's view is the set of blocks it has received and,
implicitly, the weak headers whose arrival time has passed.

Weight is measured in strong blocks at the initial difficulty: a block mined
at target T counts T0/T, a weak header T0/(T * ratio).
"""

import heapq
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..core.retarget import retarget
from ..core.rewards import payout_amounts
from ..mining import stream
from .config import SelfishLead, SimConfig, StrategyKind
from .metrics import RunMetrics

INF = math.inf
_FIND, _ARRIVE, _RECHECK, _BATCH = range(4)
BATCH_SPAN = 600.0
CAND_DEPTH = 2     # fork choice looks at known blocks this close to the highest known height
KEEP_DEPTH = 30    # weak-header arrays of parents deeper than this are dropped
TOL = 1e-9         # chain values are float sums; closer than this counts as equal


class _Block:
    __slots__ = ("id", "parent", "miner", "height", "cum", "t_found", "t_pub", "arrival",
                 "timestamp", "window", "target", "child_target", "f_child", "weak_by",
                 "weak_ts_sum", "allowed", "children", "version")

    def __init__(self, **kw):
        self.children = []
        self.version = 0
        for k, v in kw.items():
            setattr(self, k, v)


class _Chunk:
    """Weak headers found by one miner on one parent."""

    __slots__ = ("parent", "finder", "found", "delay", "release", "arr")

    def __init__(self, parent, finder, found, delay, release):
        self.parent = parent
        self.finder = finder
        self.found = found
        self.delay = delay  # (miners, n)
        self.release = release
        self.refresh()

    def refresh(self):
        base = np.maximum(self.found, self.release)
        arr = base[None, :] + self.delay
        arr[self.finder] = self.found
        self.arr = arr

    def __len__(self):
        return self.found.size


class _DelayPool:
    """Latency draws taken in bulk from one stream and handed out in order."""

    SIZE = 1 << 14

    def __init__(self, model, rng):
        self.model, self.rng = model, rng
        self.buf = np.empty(0)
        self.pos = 0

    def take(self, n: int) -> np.ndarray:
        if self.pos + n > self.buf.size:
            self.buf = np.concatenate([self.buf[self.pos:], self.model.sample(self.rng, max(self.SIZE, n))])
            self.pos = 0
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out


class _Miner:
    __slots__ = ("idx", "alpha", "kind", "threshold", "parent", "next_find", "find_token", "chunk",
                 "gen_until", "batch_token", "recheck_token", "known", "recv", "cands", "hmax",
                 "orphans", "rng_find", "rng_weak", "rng_lat", "unpublished", "pub_tip", "cache")


class Simulation:
    def __init__(self, cfg: SimConfig, seed: int | None = None):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.params = p = cfg.params
        self.M = len(cfg.miners)
        self.ratio = float(p.ratio)
        self.weak_per_strong = self.ratio - 1
        self.interval = float(p.target_block_interval)
        self.latency = cfg.latency
        self.heap = []
        self.seq = 0
        self.now = 0.0
        self.t_end = INF
        self.finds = 0
        self.blocks = []
        self.chunks = {}
        self.weak_found_dropped = np.zeros(self.M, dtype=np.int64)
        self.dirty = False
        g = _Block(id=0, parent=-1, miner=-1, height=0, cum=1.0, t_found=0.0, t_pub=0.0,
                   arrival=np.zeros(self.M), timestamp=p.genesis_time,
                   window=(p.genesis_time,), target=p.strong_target,
                   weak_by=np.zeros(self.M, dtype=np.int64), weak_ts_sum=0, allowed=None)
        self._set_child_target(g)
        self.blocks.append(g)
        self.miners = []
        for i, spec in enumerate(cfg.miners):
            m = _Miner()
            m.idx, m.alpha = i, float(spec.alpha)
            m.kind, m.threshold = spec.strategy.kind, spec.strategy.threshold
            m.rng_find = stream(self.seed, 0, i)
            m.rng_weak = stream(self.seed, 1, i)
            m.rng_lat = _DelayPool(self.latency, stream(self.seed, 2, i))
            m.parent = 0
            m.known = {0}
            m.recv = {0: 0}
            m.cands = [0]
            m.hmax = 0
            m.orphans = {}
            m.unpublished = []
            m.pub_tip = 0
            m.cache = {}
            m.find_token = m.batch_token = m.recheck_token = 0
            m.chunk = None
            self.miners.append(m)
        for m in self.miners:
            m.next_find = m.rng_find.exponential(1.0) / self._strong_rate(m, g)
            self._push(m.next_find, _FIND, m.idx, m.find_token)
            m.gen_until = 0.0
            self._new_chunk(m, 0, 0.0)
            self._extend_weak(m)

    # -- helpers ---------------------------------------------------------------

    def _push(self, t, kind, a, b=0):
        self.seq += 1
        heapq.heappush(self.heap, (t, self.seq, kind, a, b))

    def _set_child_target(self, b: _Block):
        p = self.params
        h = b.height + 1
        if h % p.retarget_window == 0:
            first = b
            for _ in range(p.retarget_window):
                if first.parent < 0:
                    break
                first = self.blocks[first.parent]
            b.child_target, _ = retarget(first.timestamp, b.timestamp, b.target,
                                         p.weak_target_for(b.target), p)
        else:
            b.child_target = b.target
        b.f_child = p.strong_target / b.child_target

    def _strong_rate(self, m: _Miner, parent: _Block) -> float:
        return m.alpha / (self.interval * parent.f_child)

    def _weak_rate(self, m: _Miner, parent: _Block) -> float:
        return m.alpha * self.weak_per_strong / (self.interval * parent.f_child)

    def _release_for(self, m: _Miner, parent: int) -> float:
        if m.kind is StrategyKind.RECLUSIVE:
            return INF
        if (m.kind is StrategyKind.SELFISH and self.cfg.selfish_withhold_weak
                and self.blocks[parent].t_pub == INF):
            return INF
        return -INF

    def _new_chunk(self, m: _Miner, parent: int, t: float, found=None, delay=None):
        if found is None:
            found, delay = np.empty(0), np.empty((self.M, 0))
        ch = _Chunk(parent, m.idx, found, delay, self._release_for(m, parent))
        self.chunks.setdefault(parent, []).append(ch)
        self.blocks[parent].version += 1
        m.chunk = ch

    def _extend_weak(self, m: _Miner):
        """Generate the next batch of weak headers for ``m`` on its current parent."""
        if self.weak_per_strong > 0 and self.t_end == INF:
            a = m.gen_until
            rate = self._weak_rate(m, self.blocks[m.parent])
            n = m.rng_weak.poisson(rate * BATCH_SPAN)
            if n:
                found = np.sort(a + BATCH_SPAN * m.rng_weak.random(n))
                delay = np.zeros((self.M, n))
                others = [i for i in range(self.M) if i != m.idx]   # own row is unused
                delay[others] = m.rng_lat.take(len(others) * n).reshape(len(others), n)
                ch = m.chunk
                ch.found = np.concatenate([ch.found, found])
                ch.delay = np.concatenate([ch.delay, delay], axis=1)
                ch.refresh()
                self.blocks[ch.parent].version += 1
            m.gen_until = a + BATCH_SPAN
            m.batch_token += 1
            self._push(m.gen_until, _BATCH, m.idx, m.batch_token)

    def _switch(self, m: _Miner, t: float, new_parent: int):
        """Move ``m`` to mine on ``new_parent`` from time ``t``."""
        old = self.blocks[m.parent]
        new = self.blocks[new_parent]
        scale = new.f_child / old.f_child
        ch = m.chunk
        keep = ch.found <= t
        moved_found = t + (ch.found[~keep] - t) * scale
        moved_delay = ch.delay[:, ~keep]
        if not keep.all():
            ch.found, ch.delay = ch.found[keep], ch.delay[:, keep]
            ch.refresh()
            old.version += 1
        m.parent = new_parent
        self._new_chunk(m, new_parent, t, moved_found, moved_delay)
        if self.t_end == INF:
            if scale != 1.0:
                m.next_find = t + (m.next_find - t) * scale
                m.find_token += 1
                self._push(m.next_find, _FIND, m.idx, m.find_token)
                m.gen_until = t + (m.gen_until - t) * scale
                m.batch_token += 1
                self._push(m.gen_until, _BATCH, m.idx, m.batch_token)
        self.dirty = True

    # -- views -----------------------------------------------------------------

    def _arrivals(self, j: int, x: _Block) -> np.ndarray:
        """Sorted arrival times at ``j`` of weak headers on ``x`` not in any block ``j`` knows."""
        m = self.miners[j]
        kids = [c for c in x.children if c.id in m.known]
        key = (x.version, len(kids))
        hit = m.cache.get(x.id)
        if hit is not None and hit[0] == key:
            return hit[1]
        parts = []
        for ch in self.chunks.get(x.id, ()):
            a = ch.arr[j]
            inc = None
            for c in kids:
                if c.allowed is not None and ch.finder not in c.allowed:
                    continue
                mask = ch.arr[c.miner] <= c.t_found
                inc = mask if inc is None else inc | mask
            parts.append(a if inc is None else a[~inc])
        arr = np.sort(np.concatenate(parts)) if parts else np.empty(0)
        m.cache[x.id] = (key, arr)
        return arr

    def _value(self, j: int, x: _Block, t: float) -> float:
        arr = self._arrivals(j, x)
        return x.cum + x.f_child / self.ratio * np.searchsorted(arr, t, "right")

    def _best(self, j: int, t: float, public_only: bool = False, current: int | None = None) -> int:
        m = self.miners[j]
        current = m.parent if current is None else current
        best, best_v, best_o = None, -INF, 0
        cur_v = None
        for bid in m.cands:
            b = self.blocks[bid]
            if public_only and b.t_pub == INF:
                continue
            v = self._value(j, b, t)
            if bid == current:
                cur_v = v
            o = m.recv[bid]
            if v > best_v + TOL or (v >= best_v - TOL and o < best_o):
                best, best_v, best_o = bid, max(v, best_v), o
        if cur_v is not None and cur_v >= best_v - TOL:
            return current
        return best

    def _crossing(self, j: int, t: float, a: _Block, b: _Block, thr: float, strict: bool) -> float:
        """First time after ``t`` that value(a) - value(b) exceeds ``thr`` through a's weak arrivals."""
        ua, ub = a.f_child / self.ratio, b.f_child / self.ratio
        # even every weak header on ``a`` arriving cannot close the gap
        if a.cum + ua * sum(len(ch) for ch in self.chunks.get(a.id, ())) - b.cum < thr - TOL:
            return INF
        arr_a = self._arrivals(j, a)
        i0 = np.searchsorted(arr_a, t, "right")
        fut = arr_a[i0:]
        fut = fut[fut < INF]
        if not fut.size:
            return INF
        arr_b = self._arrivals(j, b)
        now_b = b.cum + ub * np.searchsorted(arr_b, t, "right")
        if a.cum + ua * (i0 + fut.size) - now_b < thr - TOL:
            return INF
        ca = i0 + np.arange(1, fut.size + 1)
        cb = np.searchsorted(arr_b, fut, "right")
        diff = (a.cum + ua * ca) - (b.cum + ub * cb)
        hit = diff > thr + TOL if strict else diff >= thr - TOL
        k = int(np.argmax(hit))
        return float(fut[k]) if hit[k] else INF

    def _schedule_recheck(self, j: int, t: float):
        m = self.miners[j]
        tc = INF
        if m.kind is StrategyKind.SELFISH and m.unpublished:
            priv = self.blocks[m.unpublished[-1]]
            pub = self.blocks[m.pub_tip]
            one = priv.f_child
            if self.cfg.selfish_lead is SelfishLead.FORK_VALUE:
                tc = self._crossing(j, t, pub, priv, one, False)
                if len(m.unpublished) >= 2 and self._value(j, priv, t) - self._value(j, pub, t) > one + TOL:
                    tc = min(tc, self._crossing(j, t, pub, priv, -one, False))
            for bid in m.cands:
                b = self.blocks[bid]
                if bid != pub.id and b.t_pub < INF:
                    tc = min(tc, self._crossing(j, t, b, pub, 0.0, True))
        else:
            cur = self.blocks[m.parent]
            for bid in m.cands:
                if bid != cur.id and self.blocks[bid].t_pub < INF:
                    tc = min(tc, self._crossing(j, t, self.blocks[bid], cur, 0.0, True))
        m.recheck_token += 1
        if tc < INF:
            self._push(tc, _RECHECK, j, m.recheck_token)

    # -- strategy --------------------------------------------------------------

    def _evaluate(self, j: int, t: float):
        m = self.miners[j]
        if m.kind is StrategyKind.SELFISH:
            target = self._selfish_target(m, t)
        else:
            target = self._best(j, t)
        if target != m.parent:
            self._switch(m, t, target)
        self._schedule_recheck(j, t)

    def _selfish_target(self, m: _Miner, t: float) -> int:
        j = m.idx
        m.pub_tip = self._best(j, t, public_only=True, current=m.pub_tip)
        if not m.unpublished:
            return m.pub_tip
        priv = self.blocks[m.unpublished[-1]]
        pub = self.blocks[m.pub_tip]
        one = priv.f_child
        if self.cfg.selfish_lead is SelfishLead.CHAIN_POW:
            alt = max(self.blocks[c].cum for c in m.cands if self.blocks[c].t_pub < INF)
            lead = priv.cum - alt
        else:
            lead = self._value(j, priv, t) - self._value(j, pub, t)
        if -lead >= one - TOL:
            dead = set(m.unpublished)   # adopt the public chain
            m.cands = [c for c in m.cands if c not in dead]
            m.unpublished = []
            return pub.id
        if len(m.unpublished) >= 2 and TOL < lead <= one + TOL:
            self._publish(m, t)
        return priv.id

    def _publish(self, m: _Miner, t: float):
        for bid in m.unpublished:
            b = self.blocks[bid]
            b.t_pub = t
            b.arrival = t + self._delays(m)
            b.arrival[m.idx] = b.t_found
            self._announce(b)
            for ch in self.chunks.get(bid, ()):
                if ch.finder == m.idx and ch.release == INF:
                    ch.release = t
                    ch.refresh()
                    b.version += 1
        m.unpublished = []
        m.pub_tip = m.parent
        self.dirty = True

    def _delays(self, m: _Miner) -> np.ndarray:
        return m.rng_lat.take(self.M).copy()

    def _announce(self, b: _Block):
        for j in range(self.M):
            if j != b.miner:
                self._push(b.arrival[j], _ARRIVE, j, b.id)

    # -- events ----------------------------------------------------------------

    def _timestamp(self, m: _Miner, parent: _Block, t: float) -> int:
        mtp = statistics.median(parent.window)
        now = self.params.genesis_time + math.floor(t)
        if m.kind is StrategyKind.TIMESTAMP_SLOW:
            return int(mtp) + 1
        if m.kind is StrategyKind.TIMESTAMP_FAST:
            return now + self.params.max_future_drift
        return max(now, int(mtp) + 1)

    def _weak_timestamps(self, finder: _Miner, parent: _Block, found: np.ndarray) -> np.ndarray:
        mtp = int(statistics.median(parent.window))
        now = self.params.genesis_time + np.floor(found)
        if finder.kind is StrategyKind.TIMESTAMP_SLOW:
            return np.full(found.size, mtp + 1.0)
        if finder.kind is StrategyKind.TIMESTAMP_FAST:
            return now + self.params.max_future_drift
        return np.maximum(now, mtp + 1.0)

    def _on_find(self, j: int, t: float):
        m = self.miners[j]
        parent = self.blocks[m.parent]
        weak_by = np.zeros(self.M, dtype=np.int64)
        ts_sum = 0.0
        sel = []
        for ch in self.chunks.get(parent.id, ()):
            mask = ch.arr[j] <= t
            if mask.any():
                sel.append((ch, mask))
        allowed = None
        if m.kind is StrategyKind.SPITEFUL:
            foreign = sum(int(mask.sum()) for ch, mask in sel if ch.finder != j)
            if not (m.threshold > 0 and foreign / self.ratio > m.threshold):
                allowed = frozenset((j,))
        for ch, mask in sel:
            if allowed is not None and ch.finder not in allowed:
                continue
            weak_by[ch.finder] += int(mask.sum())
            ts_sum += float(self._weak_timestamps(self.miners[ch.finder], parent,
                                                  ch.found[mask]).sum())
        n = int(weak_by.sum())
        ts = self._timestamp(m, parent, t)
        private = m.kind is StrategyKind.SELFISH
        b = _Block(id=len(self.blocks), parent=parent.id, miner=j, height=parent.height + 1,
                   cum=parent.cum + parent.f_child * (1 + n / self.ratio), t_found=t,
                   t_pub=INF if private else t, arrival=None, timestamp=ts,
                   window=(parent.window + (ts,))[-self.params.median_window:],
                   target=parent.child_target, weak_by=weak_by, weak_ts_sum=ts_sum,
                   allowed=allowed)
        self._set_child_target(b)
        self.blocks.append(b)
        parent.children.append(b)
        parent.version += 1
        if private:
            b.arrival = np.full(self.M, INF)
            b.arrival[j] = t
            m.unpublished.append(b.id)
        else:
            b.arrival = t + self._delays(m)
            b.arrival[j] = t
            self._announce(b)
        self.finds += 1
        if self.finds >= self.cfg.horizon:
            self._finish_generation(t)
        else:
            m.next_find = t + m.rng_find.exponential(1.0) / self._strong_rate(m, parent)
            m.find_token += 1
            self._push(m.next_find, _FIND, j, m.find_token)
        self._learn(m, b.id)
        if private:
            self._switch(m, t, b.id)
        self._evaluate(j, t)

    def _learn(self, m: _Miner, bid: int):
        b = self.blocks[bid]
        m.known.add(bid)
        m.recv[bid] = len(m.recv)
        if b.t_pub == INF:
            m.cands.append(bid)     # own private block; does not move the public height floor
        elif b.height > m.hmax:
            m.hmax = b.height
            floor_h = m.hmax - CAND_DEPTH
            m.cands = [c for c in m.cands if self.blocks[c].height >= floor_h
                       or self.blocks[c].t_pub == INF]
            if len(m.cache) > 64:
                m.cache = {k: v for k, v in m.cache.items() if k in m.cands}
        if b.t_pub < INF and b.height >= m.hmax - CAND_DEPTH:
            m.cands.append(bid)
        for child in m.orphans.pop(bid, ()):
            self._learn(m, child)

    def _on_arrive(self, j: int, bid: int, t: float):
        m = self.miners[j]
        if bid in m.known:
            return
        b = self.blocks[bid]
        if b.parent not in m.known:
            m.orphans.setdefault(b.parent, []).append(bid)
            return
        self._learn(m, bid)
        self._evaluate(j, t)

    def _finish_generation(self, t: float):
        """Horizon reached: no more finds, and drop weak headers found after ``t``."""
        self.t_end = t
        for chs in self.chunks.values():
            for ch in chs:
                keep = ch.found <= t
                if not keep.all():
                    ch.found, ch.delay = ch.found[keep], ch.delay[:, keep]
                    ch.refresh()
                    self.blocks[ch.parent].version += 1

    def _prune(self):
        hmax = max(m.hmax for m in self.miners)
        live = {m.parent for m in self.miners}
        dead = [pid for pid in self.chunks
                if self.blocks[pid].height < hmax - KEEP_DEPTH and pid not in live]
        for pid in dead:
            for ch in self.chunks.pop(pid):
                self.weak_found_dropped[ch.finder] += len(ch)

    def run(self) -> RunMetrics:
        last_prune = 0
        while self.heap:
            t, _, kind, a, b = heapq.heappop(self.heap)
            self.now = t
            if kind == _FIND:
                m = self.miners[a]
                if b == m.find_token and self.t_end == INF:
                    self._on_find(a, t)
            elif kind == _ARRIVE:
                self._on_arrive(a, b, t)
            elif kind == _RECHECK:
                if b == self.miners[a].recheck_token:
                    self._evaluate(a, t)
            elif kind == _BATCH:
                m = self.miners[a]
                if b == m.batch_token and self.t_end == INF:
                    self._extend_weak(m)
                    self.dirty = True
            if self.dirty:
                self.dirty = False
                for j in range(self.M):
                    self._schedule_recheck(j, t)
            if len(self.blocks) - last_prune > 50:
                last_prune = len(self.blocks)
                self._prune()
        return self._metrics()

    # -- results ---------------------------------------------------------------

    def main_chain(self) -> list[_Block]:
        best = max((b for b in self.blocks if b.t_pub < INF), key=lambda b: (round(b.cum, 7), -b.t_pub, -b.id))
        out = []
        while best.parent >= 0:
            out.append(best)
            best = self.blocks[best.parent]
        return out[::-1]

    def _metrics(self) -> RunMetrics:
        cfg, M = self.cfg, self.M
        chain = self.main_chain()
        tip = chain[-1] if chain else self.blocks[0]
        strong_amt, weak_amt = payout_amounts(self.params)
        found_by = np.bincount([b.miner for b in self.blocks[1:]], minlength=M)
        main_by = np.bincount([b.miner for b in chain], minlength=M)
        weak_found = self.weak_found_dropped.copy()
        for chs in self.chunks.values():
            for ch in chs:
                weak_found[ch.finder] += len(ch)
        rewards = np.zeros((len(chain), M), dtype=np.int64)
        weak_inc = np.zeros(M, dtype=np.int64)
        dev_s = np.empty(len(chain))
        dev_e = np.empty(len(chain))
        g0 = self.params.genesis_time
        w = 1 / self.ratio
        for i, b in enumerate(chain):
            rewards[i] = b.weak_by * weak_amt
            rewards[i, b.miner] += strong_amt
            weak_inc += b.weak_by
            true = g0 + b.t_found
            n = int(b.weak_by.sum())
            dev_s[i] = b.timestamp - true
            dev_e[i] = (b.timestamp + w * b.weak_ts_sum) / (1 + w * n) - true
        pending = 0
        for ch in self.chunks.get(tip.id, ()):
            pending += len(ch)
        later = self.t_end + 1e9
        # withheld blocks are not part of any agreement, so selfish miners vote with their public view
        tips = {self._best(j, later, public_only=True, current=m.pub_tip)
                if m.kind is StrategyKind.SELFISH else self._best(j, later)
                for j, m in enumerate(self.miners)}
        lat = cfg.latency
        return RunMetrics(
            name=cfg.name, seed=self.seed, alphas=cfg.alphas,
            strategies=[str(m.strategy) for m in cfg.miners], ratio=float(cfg.ratio),
            gamma=float(cfg.gamma), latency=lat.family.value, latency_mean=lat.mean,
            latency_shape=lat.shape, horizon=cfg.horizon, block_reward=cfg.block_reward,
            duration=self.t_end, strong_found_by=found_by, strong_main_by=main_by,
            weak_found_by=weak_found, weak_included_by=weak_inc, weak_pending=pending,
            reward_by=rewards.sum(axis=0), block_rewards=rewards, ts_dev_strong=dev_s,
            ts_dev_effective=dev_e, converged=tips == {tip.id})


def run_scenario(cfg: SimConfig, seed: int | None = None) -> RunMetrics:
    """Simulate ``cfg`` until ``cfg.horizon`` strong blocks have been found, then drain the network."""
    return Simulation(cfg, seed).run()


def run_seeds(cfg: SimConfig) -> list[RunMetrics]:
    return [run_scenario(cfg, cfg.seed + k) for k in range(cfg.seeds)]


def _run_job(job):
    return run_scenario(*job)


def run_matrix(cfgs, workers: int | None = None) -> list[list[RunMetrics]]:
    """Every seed of every config, in order.  Runs are independent, so with
    ``workers > 1`` they are spread over processes; results do not depend on it."""
    jobs = [(cfg, cfg.seed + k) for cfg in cfgs for k in range(cfg.seeds)]
    workers = os.cpu_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(min(workers, len(jobs))) as ex:
            flat = list(ex.map(_run_job, jobs))
    else:
        flat = [_run_job(j) for j in jobs]
    out, i = [], 0
    for cfg in cfgs:
        out.append(flat[i:i + cfg.seeds])
        i += cfg.seeds
    return out
