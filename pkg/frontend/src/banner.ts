/** Error banner pinned across the top of the page. */

export class Banner {
  constructor(private readonly el: HTMLElement) {}

  show(message: string): void {
    this.el.textContent = message;
    this.el.hidden = false;
  }

  hide(): void {
    this.el.hidden = true;
    this.el.textContent = "";
  }
}
