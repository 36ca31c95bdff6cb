/**
 * Application wiring: fetches trials from the session service, runs the
 * per-protocol state machines, renders both viewports, and submits votes.
 * One trial at a time; the next begins only after the vote is
 * acknowledged.
 */

import { decodePackedCloud } from "./asset.js";
import { OrbitCamera, cameraDistanceForBitDepth } from "./camera.js";
import { DsisTrial } from "./dsisTrial.js";
import { PwcTrial } from "./pwcTrial.js";
import { DSIS_SCALE_LABELS, PwcChoice, TrialDescriptor } from "./protocol.js";
import { PointCloudRenderer } from "./render.js";
import { SessionClient } from "./session.js";

interface Dom {
  left: HTMLCanvasElement;
  right: HTMLCanvasElement;
  panel: HTMLElement;
  status: HTMLElement;
  timer: HTMLElement;
}

function grabDom(): Dom {
  const byId = (id: string) => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    left: byId("viewport-left") as HTMLCanvasElement,
    right: byId("viewport-right") as HTMLCanvasElement,
    panel: byId("vote-panel"),
    status: byId("status"),
    timer: byId("timer"),
  };
}

async function loadClouds(client: SessionClient, trial: TrialDescriptor,
                          renderers: [PointCloudRenderer, PointCloudRenderer]) {
  const [leftBuf, rightBuf] = await Promise.all([
    client.fetchAsset(trial.left.asset),
    client.fetchAsset(trial.right.asset),
  ]);
  const left = decodePackedCloud(leftBuf);
  const right = decodePackedCloud(rightBuf);
  renderers[0].setCloud(left);
  renderers[1].setCloud(right);
  return { left, right };
}

function clearPanel(panel: HTMLElement): void {
  while (panel.firstChild) panel.removeChild(panel.firstChild);
}

function showDsisPanel(panel: HTMLElement, onVote: (score: number) => void): void {
  clearPanel(panel);
  for (const [score, label] of DSIS_SCALE_LABELS) {
    const button = document.createElement("button");
    button.textContent = `${score} - ${label}`;
    button.onclick = () => onVote(score);
    panel.appendChild(button);
  }
  panel.classList.add("visible");
}

function showPwcPanel(panel: HTMLElement, onVote: (choice: PwcChoice) => void): void {
  clearPanel(panel);
  const options: Array<[PwcChoice, string]> = [
    ["left", "Left"], ["right", "Right"], ["not_sure", "Not Sure"],
  ];
  for (const [choice, label] of options) {
    const button = document.createElement("button");
    button.textContent = label;
    button.onclick = () => onVote(choice);
    panel.appendChild(button);
  }
  panel.classList.add("visible");
}

async function runDsisTrial(dom: Dom, client: SessionClient,
                            renderers: [PointCloudRenderer, PointCloudRenderer],
                            descriptor: TrialDescriptor): Promise<void> {
  const trial = new DsisTrial(descriptor);
  const clouds = await loadClouds(client, descriptor, renderers);
  const camera = new OrbitCamera(
    clouds.left.center, cameraDistanceForBitDepth(descriptor.left.bit_depth));
  trial.assetsReady(performance.now());

  return new Promise((resolve, reject) => {
    let panelShown = false;
    const frame = () => {
      const now = performance.now();
      const phase = trial.tick(now);
      const spin = trial.rotationAngleDeg(now);
      renderers[0].render(camera.pose(),
                          { pointSize: descriptor.left.point_size, spinDeg: spin });
      renderers[1].render(camera.pose(),
                          { pointSize: descriptor.right.point_size, spinDeg: spin });
      if (trial.votePanelVisible() && !panelShown) {
        panelShown = true;
        showDsisPanel(dom.panel, (score) => {
          const payload = trial.submitVote(score, performance.now());
          if (!payload) return;  // panel not active: input ignored
          dom.panel.classList.remove("visible");
          client.submitVote(payload).then(() => resolve(), reject);
        });
      }
      if (phase !== "submitted") {
        requestAnimationFrame(frame);
      }
    };
    requestAnimationFrame(frame);
  });
}

async function runPwcTrial(dom: Dom, client: SessionClient,
                           renderers: [PointCloudRenderer, PointCloudRenderer],
                           descriptor: TrialDescriptor): Promise<void> {
  const clouds = await loadClouds(client, descriptor, renderers);
  const trial = new PwcTrial(descriptor, clouds.left.center);
  trial.assetsReady(performance.now());

  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  const down = (ev: PointerEvent) => {
    dragging = true;
    lastX = ev.clientX;
    lastY = ev.clientY;
  };
  const move = (ev: PointerEvent) => {
    if (!dragging) return;
    trial.pointerDrag(ev.clientX - lastX, ev.clientY - lastY, performance.now());
    lastX = ev.clientX;
    lastY = ev.clientY;
  };
  const up = () => { dragging = false; };
  for (const canvas of [dom.left, dom.right]) {
    canvas.addEventListener("pointerdown", down);
    canvas.addEventListener("pointermove", move);
  }
  window.addEventListener("pointerup", up);
  // losing capture freezes the orbit but the timer keeps counting
  window.addEventListener("pointercancel", up);

  return new Promise((resolve, reject) => {
    let panelShown = false;
    const frame = () => {
      const now = performance.now();
      const phase = trial.tick(now);
      dom.timer.textContent = `${Math.ceil(trial.remainingMs(now) / 1000)}s`;
      renderers[0].render(trial.camera.pose(),
                          { pointSize: descriptor.left.point_size });
      renderers[1].render(trial.camera.pose(),
                          { pointSize: descriptor.right.point_size });
      if (trial.votePanelVisible() && !panelShown) {
        panelShown = true;
        showPwcPanel(dom.panel, (choice) => {
          const payload = trial.submitVote(choice, performance.now());
          if (!payload) return;
          dom.panel.classList.remove("visible");
          client.submitVote(payload).then(() => resolve(), reject);
        });
      }
      if (phase !== "submitted") {
        requestAnimationFrame(frame);
      }
    };
    requestAnimationFrame(frame);
  });
}

export async function runSession(baseUrl: string, sessionId: string): Promise<void> {
  const dom = grabDom();
  const client = new SessionClient(baseUrl, sessionId);
  const renderers: [PointCloudRenderer, PointCloudRenderer] =
    [new PointCloudRenderer(dom.left), new PointCloudRenderer(dom.right)];

  for (;;) {
    const next = await client.nextTrial();
    if (next.done) {
      dom.status.textContent = "Session complete. Thank you!";
      return;
    }
    dom.status.textContent = `Trial ${next.trial_index + 1}`;
    try {
      if (next.protocol === "DSIS") {
        await runDsisTrial(dom, client, renderers, next);
      } else {
        await runPwcTrial(dom, client, renderers, next);
      }
    } catch (err) {
      // asset failure: record the error and skip to the next trial
      console.error(`trial ${next.trial_index} failed`, err);
      dom.status.textContent = `Trial ${next.trial_index + 1} failed to load; skipping`;
      return;
    }
  }
}

declare global {
  interface Window { startExperiment?: (base: string, session: string) => void }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.startExperiment = (base: string, session: string) => {
    runSession(base, session).catch((err) => {
      const status = document.getElementById("status");
      if (status) status.textContent = String(err);
    });
  };
}
