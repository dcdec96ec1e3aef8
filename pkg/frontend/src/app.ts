/**
 * Browser entry point. Wires the DOM to the service client: a raw panel and
 * an enhanced panel rendered side by side, parameter knobs, an ROI editor,
 * the contrast-ratio readout and the stability badge. Every displayed value
 * comes from the service; this file only moves bytes onto canvases.
 */

import { ApiClient, ApiError, MetricsReport, RoiBody, SessionDescriptor } from './api.js';
import { stabilityLabel } from './badge.js';
import { debounce } from './debounce.js';
import { formatRatio, formatSpread } from './format.js';
import { LatestGate } from './latest.js';
import {
  PipelineParams,
  ViewerState,
  isMethod,
  outputCount,
  queryToState,
  rawIndexFor,
  stateToQuery,
} from './params.js';
import { PolygonDraft, canSubmit, roiBody } from './roi.js';

const RAW_VIEW: PipelineParams = {
  method: 'none',
  alpha: 0,
  window: 20,
  percentile: 20,
  closure: 0,
  leakage: false,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readState(): ViewerState {
  try {
    return queryToState(new URLSearchParams(location.search));
  } catch (err) {
    console.warn('ignoring malformed query string:', err);
    return queryToState(new URLSearchParams());
  }
}

class Viewer {
  private client: ApiClient;
  private session: SessionDescriptor | null = null;
  private state: ViewerState = readState();
  private spread: number | null = null;
  private drafts = [new PolygonDraft('lesion'), new PolygonDraft('normal')];
  private activeDraft = 0;
  private haveRois = false;

  private frameGate = new LatestGate();
  private metricsGate = new LatestGate();

  private rawCanvas = el<HTMLCanvasElement>('raw-canvas');
  private enhCanvas = el<HTMLCanvasElement>('enhanced-canvas');
  private overlay = el<HTMLCanvasElement>('roi-overlay');
  private scrubber = el<HTMLInputElement>('scrubber');

  private refreshSoon = debounce(() => this.refresh(), 150);

  constructor() {
    const api = new URLSearchParams(location.search).get('api');
    this.client = new ApiClient(api ?? `http://${location.hostname}:8000`);
    el<HTMLInputElement>('service-url').value = this.client.baseUrl;
    this.bindControls();
    this.pushControls();
  }

  private bindControls(): void {
    el<HTMLButtonElement>('load-button').addEventListener('click', () => {
      void this.openSession();
    });

    this.scrubber.addEventListener('input', () => {
      this.state.frame = Number(this.scrubber.value);
      this.syncUrl();
      void this.refreshFrames();
    });

    const onParamChange = (): void => {
      this.pullControls();
      this.syncUrl();
      this.refreshSoon();
    };
    for (const id of ['method', 'alpha', 'window', 'percentile', 'closure', 'leakage']) {
      el<HTMLElement>(id).addEventListener('input', onParamChange);
    }
    el<HTMLInputElement>('threshold').addEventListener('input', () => {
      this.pullControls();
      this.syncUrl();
      this.renderBadge();
    });

    for (const [index, id] of ['draft-lesion', 'draft-normal'].entries()) {
      el<HTMLInputElement>(id).addEventListener('change', () => {
        this.activeDraft = index;
      });
    }
    this.overlay.addEventListener('click', (event) => this.onOverlayClick(event));
    el<HTMLButtonElement>('roi-undo').addEventListener('click', () => {
      this.drafts[this.activeDraft].undo();
      this.renderOverlay();
    });
    el<HTMLButtonElement>('roi-clear').addEventListener('click', () => {
      for (const draft of this.drafts) draft.clear();
      this.renderOverlay();
    });
    el<HTMLButtonElement>('roi-submit').addEventListener('click', () => {
      void this.submitRois();
    });
  }

  /** Copy this.state into the DOM controls. */
  private pushControls(): void {
    el<HTMLSelectElement>('method').value = this.state.method;
    el<HTMLInputElement>('alpha').value = String(this.state.alpha);
    el<HTMLInputElement>('window').value = String(this.state.window);
    el<HTMLInputElement>('percentile').value = String(this.state.percentile);
    el<HTMLInputElement>('closure').value = String(this.state.closure);
    el<HTMLInputElement>('leakage').checked = this.state.leakage;
    el<HTMLInputElement>('threshold').value = String(this.state.threshold);
    el<HTMLSpanElement>('alpha-value').textContent = String(this.state.alpha);
  }

  /** Copy the DOM controls into this.state. */
  private pullControls(): void {
    const method = el<HTMLSelectElement>('method').value;
    if (isMethod(method)) this.state.method = method;
    this.state.alpha = Number(el<HTMLInputElement>('alpha').value);
    this.state.window = Number(el<HTMLInputElement>('window').value);
    this.state.percentile = Number(el<HTMLInputElement>('percentile').value);
    this.state.closure = Number(el<HTMLInputElement>('closure').value);
    this.state.leakage = el<HTMLInputElement>('leakage').checked;
    this.state.threshold = Number(el<HTMLInputElement>('threshold').value);
    el<HTMLSpanElement>('alpha-value').textContent = String(this.state.alpha);
  }

  private syncUrl(): void {
    const query = stateToQuery(this.state);
    const manifest = el<HTMLInputElement>('manifest-path').value;
    if (manifest) query.set('manifest', manifest);
    const api = new URLSearchParams(location.search).get('api');
    if (api) query.set('api', api);
    history.replaceState(null, '', `?${query.toString()}`);
  }

  private setStatus(text: string): void {
    el<HTMLSpanElement>('status').textContent = text;
  }

  private async openSession(): Promise<void> {
    this.client = new ApiClient(el<HTMLInputElement>('service-url').value);
    const manifest = el<HTMLInputElement>('manifest-path').value;
    try {
      this.session = await this.client.createSession(manifest);
    } catch (err) {
      this.session = null;
      this.setStatus(err instanceof Error ? err.message : String(err));
      return;
    }
    const s = this.session;
    this.setStatus(`loaded ${manifest}: ${s.n_frames} frames, ${s.width}x${s.height}`);
    this.haveRois = false;
    try {
      const stored = await this.client.getRois(s.id);
      this.adoptRois(stored);
      this.haveRois = true;
    } catch {
      // no regions stored for this loop yet
    }
    this.sizeCanvases();
    this.syncUrl();
    await this.refresh();
  }

  private adoptRois(body: RoiBody): void {
    for (const draft of this.drafts) draft.clear();
    for (const roi of body.rois) {
      const draft = this.drafts.find((d) => d.label === roi.label);
      if (!draft) continue;
      for (const [x, y] of roi.polygon) draft.add(x, y);
    }
  }

  private sizeCanvases(): void {
    if (!this.session) return;
    const scale = Math.max(1, Math.floor(360 / Math.max(this.session.width, this.session.height)));
    for (const canvas of [this.rawCanvas, this.enhCanvas, this.overlay]) {
      canvas.width = this.session.width * scale;
      canvas.height = this.session.height * scale;
    }
  }

  /** Everything that depends on the current parameters, debounced upstream. */
  private async refresh(): Promise<void> {
    if (!this.session) return;
    const frames = outputCount(this.session.n_frames, this.state);
    this.scrubber.max = String(Math.max(frames - 1, 0));
    if (this.state.frame > frames - 1) this.state.frame = Math.max(frames - 1, 0);
    this.scrubber.value = String(this.state.frame);
    await Promise.all([this.refreshFrames(), this.refreshQuality(), this.refreshMetrics()]);
  }

  private async refreshFrames(): Promise<void> {
    if (!this.session) return;
    const ticket = this.frameGate.take();
    const k = this.state.frame;
    const rawIndex = Math.min(rawIndexFor(k, this.state), this.session.n_frames - 1);
    try {
      const [rawPng, enhPng] = await Promise.all([
        this.client.enhancedFrame(this.session.id, rawIndex, RAW_VIEW),
        this.client.enhancedFrame(this.session.id, k, this.state),
      ]);
      if (!this.frameGate.isCurrent(ticket)) return;
      await Promise.all([this.paint(this.rawCanvas, rawPng), this.paint(this.enhCanvas, enhPng)]);
      el<HTMLSpanElement>('raw-label').textContent = `raw frame ${rawIndex}`;
      el<HTMLSpanElement>('enhanced-label').textContent = `output ${k} (${this.state.method})`;
    } catch (err) {
      if (this.frameGate.isCurrent(ticket)) {
        this.setStatus(err instanceof Error ? err.message : String(err));
      }
    }
  }

  private async paint(canvas: HTMLCanvasElement, png: ArrayBuffer): Promise<void> {
    const bitmap = await createImageBitmap(new Blob([png], { type: 'image/png' }));
    const ctx = canvas.getContext('2d');
    if (!ctx) return;
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(bitmap, 0, 0, canvas.width, canvas.height);
    bitmap.close();
  }

  private async refreshQuality(): Promise<void> {
    if (!this.session) return;
    try {
      const quality = await this.client.quality(this.session.id);
      this.spread = quality.spread_ratio;
    } catch (err) {
      this.spread = null;
      if (err instanceof ApiError) this.setStatus(err.message);
    }
    this.renderBadge();
  }

  private renderBadge(): void {
    const badge = el<HTMLSpanElement>('badge');
    const readout = el<HTMLSpanElement>('spread');
    if (this.spread === null) {
      badge.textContent = '-';
      badge.className = 'badge';
      readout.textContent = '-';
      return;
    }
    const label = stabilityLabel(this.spread, this.state.threshold);
    badge.textContent = label;
    badge.className = `badge ${label}`;
    readout.textContent = formatSpread(this.spread);
  }

  private async refreshMetrics(): Promise<void> {
    if (!this.session) return;
    const ticket = this.metricsGate.take();
    const cr = el<HTMLSpanElement>('contrast-ratio');
    const gain = el<HTMLSpanElement>('improvement');
    if (!this.haveRois) {
      cr.textContent = 'draw regions first';
      gain.textContent = '-';
      return;
    }
    let report: MetricsReport;
    try {
      report = await this.client.metrics(this.session.id, this.state, { baseline: 'raw' });
    } catch (err) {
      if (this.metricsGate.isCurrent(ticket) && err instanceof ApiError) {
        cr.textContent = `unavailable (${err.message})`;
        gain.textContent = '-';
      }
      return;
    }
    if (!this.metricsGate.isCurrent(ticket)) return;
    cr.textContent = formatRatio(report.contrast_ratio);
    gain.textContent =
      report.improvement_factor !== undefined ? `${formatRatio(report.improvement_factor)}x` : '-';
    el<HTMLSpanElement>('eval-index').textContent = String(report.evaluation_index);
  }

  private onOverlayClick(event: MouseEvent): void {
    if (!this.session) return;
    const rect = this.overlay.getBoundingClientRect();
    const x = Math.round(((event.clientX - rect.left) / rect.width) * (this.session.width - 1));
    const y = Math.round(((event.clientY - rect.top) / rect.height) * (this.session.height - 1));
    this.drafts[this.activeDraft].add(
      Math.min(Math.max(x, 0), this.session.width - 1),
      Math.min(Math.max(y, 0), this.session.height - 1),
    );
    this.renderOverlay();
  }

  private renderOverlay(): void {
    const ctx = this.overlay.getContext('2d');
    if (!ctx || !this.session) return;
    ctx.clearRect(0, 0, this.overlay.width, this.overlay.height);
    const sx = this.overlay.width / this.session.width;
    const sy = this.overlay.height / this.session.height;
    const colors: Record<string, string> = { lesion: '#ff5252', normal: '#40c4ff' };
    for (const draft of this.drafts) {
      if (draft.empty) continue;
      ctx.strokeStyle = ctx.fillStyle = colors[draft.label] ?? '#ffffff';
      ctx.beginPath();
      draft.vertices.forEach(([x, y], i) => {
        if (i === 0) ctx.moveTo(x * sx, y * sy);
        else ctx.lineTo(x * sx, y * sy);
      });
      if (draft.complete) ctx.closePath();
      ctx.stroke();
      for (const [x, y] of draft.vertices) ctx.fillRect(x * sx - 2, y * sy - 2, 4, 4);
    }
    el<HTMLButtonElement>('roi-submit').disabled = !canSubmit(this.drafts);
  }

  private async submitRois(): Promise<void> {
    if (!this.session || !canSubmit(this.drafts)) return;
    try {
      await this.client.putRois(this.session.id, roiBody(this.drafts));
    } catch (err) {
      this.setStatus(err instanceof Error ? err.message : String(err));
      return;
    }
    this.haveRois = true;
    this.setStatus('regions saved');
    await this.refreshMetrics();
  }

  async start(): Promise<void> {
    const manifest = new URLSearchParams(location.search).get('manifest');
    if (manifest) {
      el<HTMLInputElement>('manifest-path').value = manifest;
      await this.openSession();
    }
    this.renderOverlay();
    this.renderBadge();
  }
}

void new Viewer().start();
